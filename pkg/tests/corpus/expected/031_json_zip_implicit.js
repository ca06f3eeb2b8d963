if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var keys = [1, 2, 3], values = ['a', 'b', 'c'];
var _j = __objs_rt.zip(keys, values);
console.log(_j);
