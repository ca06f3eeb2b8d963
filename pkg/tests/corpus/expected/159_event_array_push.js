if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
function __objs_evt_0(__objs_arg1, __objs_arg2) {
    console.log(__objs_arg1.length, __objs_arg2.length);
}
var _a = [];
var _b = [];
for (var _i = 0; _i < 10; _i++) {
    __objs_rt.seq(_a.push(1), __objs_evt_0(_a, _b));
}
__objs_rt.seq(_b.push('string'), __objs_evt_0(_a, _b));
console.log(_a, _b);
