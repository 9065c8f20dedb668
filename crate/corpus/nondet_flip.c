void main() {
  unsigned x = 0;
  while (__VERIFIER_nondet_int()) {
    if (x == 0) {
      x = 1;
    } else {
      x = 0;
    }
    assert(x <= 1u);
  }
}
