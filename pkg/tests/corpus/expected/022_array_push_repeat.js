if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var _a = [0], _i = 10;
__objs_rt.push_n(_a, _i, 2);
console.log(_a);
