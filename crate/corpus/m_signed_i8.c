void main() {
  i8 x = -50;
  while (x < 50) {
    x = x + 5;
  }
  assert(x == 50);
}
