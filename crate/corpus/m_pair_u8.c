void main() {
  u8 x = 0;
  u8 y = 5;
  while (x < 40) {
    x = x + 4;
    y = y + 1;
  }
  assert(y <= 255);
  assert(x == 40);
}
