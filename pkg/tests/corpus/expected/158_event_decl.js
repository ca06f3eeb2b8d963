function __objs_evt_0() {
    console.log('before_declaration');
}
function __objs_evt_1() {
    console.log('after_declaration');
}
__objs_evt_0();
var _a = 1;
__objs_evt_1(_a);
