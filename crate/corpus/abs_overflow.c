void main() {
  int x = __VERIFIER_nondet_int();
  int y;
  if (x > 10) {
    y = x - 10;
  } else {
    y = 10 - x;
  }
  assert(y >= 0);
}
