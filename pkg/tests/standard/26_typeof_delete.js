var t = typeof value;
delete obj.stale;
var u = void 0;
