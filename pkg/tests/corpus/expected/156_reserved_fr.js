var _a = 1;
if (_a === 1) {
    alert('Bonjour');
}
