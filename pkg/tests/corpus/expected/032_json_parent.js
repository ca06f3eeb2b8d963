var _j1 = { a: 1, sub_j: { fn1: function() {
    return _j1.a;
} } };
alert(_j1.sub_j.fn1());
