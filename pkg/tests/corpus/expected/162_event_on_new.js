if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var complex = __objs_rt.complex;
function __objs_evt_0() {
    console.log('instantiation');
}
var _c1 = __objs_rt.tap(new complex(1, 2), __objs_evt_0);
var _c2 = __objs_rt.tap(new complex(3, 4), __objs_evt_0);
var _s = _c1.add(_c2);
var _n = new Number(1);
