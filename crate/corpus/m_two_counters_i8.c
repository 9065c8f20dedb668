void main() {
  i8 a = 0;
  i8 b = 10;
  while (a < 10) {
    a++;
    b--;
  }
  assert(b == 0);
}
