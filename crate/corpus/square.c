void main() {
  unsigned x = __VERIFIER_nondet_uint();
  __CPROVER_assume(x < 100000u);
  unsigned y = x * x;
  assert(y < 1000000000u);
}
