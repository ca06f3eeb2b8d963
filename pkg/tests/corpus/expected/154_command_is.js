function __objs_cmd_is$generic$String(__objs_arg1, __objs_arg2) {
    return RegExp(__objs_arg2, 'i').test(typeof __objs_arg1);
}
console.log(__objs_cmd_is$generic$String(2, 'complex'));
console.log(__objs_cmd_is$generic$String('hello', 'string'));
