void main() {
  unsigned x = __VERIFIER_nondet_uint();
  unsigned z = 0;
  unsigned y = x / z;
  assert(y == 4294967295u);
  assert(x % z == x);
}
