function __objs_cmd_inside$generic$Array(__objs_arg1, __objs_arg2) {
    return __objs_arg2.includes(__objs_arg1);
}
console.log(__objs_cmd_inside$generic$Array(1, [1, 2, 3]));
