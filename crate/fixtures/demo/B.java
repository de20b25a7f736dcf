class B { void m2() { c.m3(); } }
