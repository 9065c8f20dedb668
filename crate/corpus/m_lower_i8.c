void main() {
  i8 x = __VERIFIER_nondet_char();
  __CPROVER_assume(x > 10);
  while (x > 10) {
    x = x - 3;
  }
  assert(x > 7);
}
