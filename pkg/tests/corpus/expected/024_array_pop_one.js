var _a = [0, 1, 2, 3];
_a.pop();
console.log(_a);
