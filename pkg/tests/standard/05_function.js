function add(a, b) {
    return a + b;
}
var five = add(2, 3);
