var isP = p instanceof Point;
var has = 'x' in p;
