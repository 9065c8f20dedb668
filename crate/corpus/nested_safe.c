void main() {
  unsigned i = 0;
  while (i < 3) {
    unsigned j = 0;
    while (j < 3) {
      j++;
    }
    assert(j == 3);
    i++;
  }
}
