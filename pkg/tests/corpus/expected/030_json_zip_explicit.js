var _a = { a: 1, b: 2, c: 3 };
console.log(_a);
