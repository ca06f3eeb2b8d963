var d = new Date();
var r = new Wrapper(1, 2).unwrap();
