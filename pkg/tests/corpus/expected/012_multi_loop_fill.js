var _arr = [], _limit = 3;
for (var _i = 0; _i < _limit; _i++) {
    _arr[_i * _limit] = _i;
    _arr[_i * _limit + 1] = _i;
    _arr[_i * _limit + 2] = _i;
}
console.log(_arr);
