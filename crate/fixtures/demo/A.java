class A { void m1() { b.m2(); b.m2(); c.m3(); } void m4() { m1(); } }
