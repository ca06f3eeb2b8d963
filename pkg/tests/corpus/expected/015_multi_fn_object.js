function doSomething(a) {
    return a;
}
var obj1 = 1, obj2 = doSomething;
console.log(obj2);
