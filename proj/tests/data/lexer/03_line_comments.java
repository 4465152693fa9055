int x = 1; // trailing comment
// full line comment
int y = 2;
