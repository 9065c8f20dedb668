void main() {
  unsigned x = __VERIFIER_nondet_uint();
  unsigned y = x & 15u;
  assert(y < 16u);
}
