void main() {
  int x = __VERIFIER_nondet_int();
  __CPROVER_assume(x > 0 && x < 100);
  while (x < 100) {
    x = x * 2;
  }
  assert(x < 150);
}
