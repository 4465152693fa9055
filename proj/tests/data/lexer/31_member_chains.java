obj.field.method().other;
pkg.Cls.CONST;
