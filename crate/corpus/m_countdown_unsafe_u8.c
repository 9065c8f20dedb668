void main() {
  u8 x = 20;
  u8 steps = 0;
  while (x > 0) {
    x = x - 4;
    steps++;
  }
  assert(steps < 5);
}
