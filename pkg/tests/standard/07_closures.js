function counter() {
    var n = 0;
    return function() { n++; return n; };
}
var next = counter();
next();
