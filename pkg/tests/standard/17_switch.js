switch (kind) {
    case 1:
        one();
        break;
    case 'two':
        two();
        break;
    default:
        other();
        break;
}
