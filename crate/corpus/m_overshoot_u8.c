void main() {
  u8 x = 0;
  while (x < 10) {
    x = x + 3;
  }
  assert(x == 10);
}
