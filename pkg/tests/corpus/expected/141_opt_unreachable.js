function fn$complex$complex(a, b) {
    return a.add(b);
}
