void main() {
  unsigned i = 0;
  unsigned s = 0;
  while (i < 10) {
    i++;
    if (s < 100u) {
      s = s + 7u;
    }
  }
  assert(s < 107u);
}
