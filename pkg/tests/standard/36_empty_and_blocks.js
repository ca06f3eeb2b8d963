;
{
    var scoped = 1;
}
