void main() {
  u8 x = 250;
  while (x >= 200) {
    x = x + 1;
  }
  assert(x < 5);
}
