var ns1$_a = 1, ns1$_b = 2;
function ns1$fn(x) {
    return x + 1;
}
var ns2$_a = 3, ns2$_b = 4;
var _c = 0;
console.log(ns1$_a, ns1$_b);
console.log(ns2$_a, ns2$_b, _c);
