void main() {
  unsigned x = 0;
  while (x < 3) {
    x++;
  }
  assert(x != 3);
}
