if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var complex = __objs_rt.complex;
var quaternion = __objs_rt.quaternion;
__objs_rt.def_cast('complex', 'quaternion', __objs_cast_complex$quaternion);
function __objs_cast_complex$quaternion(__objs_src) {
    return new quaternion(__objs_src.real, __objs_src.imag, 0, 0);
}
var _h = __objs_cast_complex$quaternion(__objs_rt.cast(1.1, 'complex'));
__objs_rt.factotum.alert(_h);
