if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var complex = __objs_rt.complex;
function __objs_op_0(__objs_arg1) {
    return new complex(0, __objs_arg1.imag);
}
function __objs_op_1(__objs_arg1) {
    return new complex(__objs_arg1.real, 0);
}
var _z = new complex(1, 1);
__objs_rt.factotum.alert(__objs_op_1(_z));
__objs_rt.factotum.alert(__objs_op_0(_z));
