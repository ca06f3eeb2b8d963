function doSomething(a) {
    return a;
}
var obj1 = 1, obj2 = doSomething(1);
console.log(obj2);
