if (typeof __objs_rt === 'undefined' || __objs_rt.ABI !== 1) {
    throw new Error('objs runtime (ABI 1) is not loaded');
}
var complex = __objs_rt.complex;
var _a = new complex(new int(1), new int(0)), _b = new complex(new complex(1, 2));
