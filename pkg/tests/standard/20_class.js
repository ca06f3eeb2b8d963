class Point {
    constructor(x, y) {
        this.x = x;
        this.y = y;
    }
    norm() {
        return this.x * this.x + this.y * this.y;
    }
}
var p = new Point(1, 2);
