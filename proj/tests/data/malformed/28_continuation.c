/* expect: ok */
int main(void) {
   int i, a[16];
   double s = 0.0;
#pragma omp parallel for \
      shared(a) \
      reduction(+: s)
   for (i = 0; i < 16; i++) {
      a[i] = i;
      s += a[i];
   }
   return (int)s;
}
