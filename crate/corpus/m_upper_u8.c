void main() {
  u8 x = 3;
  while (x < 200) {
    x = x + 1;
  }
  assert(x >= 200);
}
