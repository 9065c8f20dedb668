void main() {
  u8 x = 0;
  while (x < 50) {
    x = x + 2;
  }
  assert(x <= 51);
}
