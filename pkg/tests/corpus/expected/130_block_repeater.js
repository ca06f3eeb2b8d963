for (var __objs_i0 = 0; __objs_i0 < 4; __objs_i0++) {
    console.log(__objs_i0);
}
