String keep = "kkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkkk";
String drop = "dddddddddddddddddddddddddddddddddddddddddddddddddddddddddddddd";
