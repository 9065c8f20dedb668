void main() {
  __CPROVER_assume(0);
  assert(0);
}
