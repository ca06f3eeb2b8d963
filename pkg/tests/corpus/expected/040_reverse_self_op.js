if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var _s1 = 'I', _s2 = 'am';
var _s3 = _s1;
_s3 += _s2;
__objs_rt.factotum.log(_s3);
_s3 = _s1;
_s2 = _s3 + _s2;
__objs_rt.factotum.log(_s2);
