configure({ retries: 3 }, [1, 2], done);
handler.call(null, 'evt');
