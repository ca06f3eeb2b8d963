function fn$Number(__objs_box_v) {
    __objs_box_v.v++;
}
var a = 1;
var __objs_b0 = { v: a };
fn$Number(__objs_b0);
a = __objs_b0.v;
console.log(a);
