function fn$complex$complex(a) {
    return a;
}
