void main() {
  unsigned x = 0;
  while (1) {
    x++;
    assert(x < 7u);
  }
}
