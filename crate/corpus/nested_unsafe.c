void main() {
  unsigned i = 0;
  while (i < 4) {
    unsigned j = 0;
    while (j < i) {
      j++;
    }
    assert(j < 3);
    i++;
  }
}
