void main() {
  u8 n = __VERIFIER_nondet_uchar();
  u8 i = 0;
  __CPROVER_assume(n <= 30);
  while (i < n) {
    i++;
  }
  assert(i <= 30);
}
