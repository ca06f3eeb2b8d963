function __objs_op_0(__objs_arg1, __objs_arg2) {
    let _a = [];
    for (let _i = __objs_arg1; _i <= __objs_arg2; _i++) {
        _a.push(_i);
    }
    return _a;
}
alert(__objs_op_0(1, 10));
