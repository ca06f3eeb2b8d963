var _a = 1.5;
