a += 1;
b -= 2;
c *= 3;
d /= 4;
e %= 5;
f <<= 1;
g >>= 1;
h &= 1;
i |= 2;
j ^= 3;
