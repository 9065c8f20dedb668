void main() {
  unsigned x = 0;
  while (1) {
    if (x < 10) {
      x++;
    } else {
      x = 0;
    }
    assert(x <= 10);
  }
}
