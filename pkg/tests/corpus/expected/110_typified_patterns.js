if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var complex = __objs_rt.complex;
var _arg = 1, _arg1 = 2, _arg2 = 3;
var _r1 = new complex();
var _r2 = new complex(_arg);
var _r3 = new complex(), _r4 = new complex();
var _r5 = new complex(_arg1, _arg2);
