if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var complex = __objs_rt.complex;
var __objs_sigs_fn = [{ params: ['complex'], fn: fn$complex, ret: null }, { params: ['Number'], fn: fn$Number, ret: null }];
function fn$complex(a) {
    return 'complex';
}
function fn$Number(a) {
    return 'number';
}
console.log(fn$Number(1));
console.log(fn$complex(new complex(1, 2)));
console.log(__objs_rt.dispatch('fn', __objs_sigs_fn, ['String']));
