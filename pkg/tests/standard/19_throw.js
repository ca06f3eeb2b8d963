function need(x) {
    if (!x) {
        throw new Error('missing');
    }
    return x;
}
