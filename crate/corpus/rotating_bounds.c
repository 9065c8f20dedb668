void main() {
  int w=0,x,y,z;
  __CPROVER_assume(x==y && y==z && -10<=x && x<0);
  while(1) {
    z = -y;
    y = -x;
    w++;
    x = x + w;
    if(w%3 != 1) w = w/3;
    if(x>=10) x = y = z = 0;
    assert(x<=z+3);
  }
}
