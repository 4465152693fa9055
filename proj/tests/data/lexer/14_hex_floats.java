double h = 0x1.8p3;
double i = 0xA.p-2d;
