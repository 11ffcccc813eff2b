/* expect: error comma in loop init */
int main(void) {
   int i, j, a[10];
#pragma omp parallel for shared(a) private(j)
   for (i = 0, j = 0; i < 10; i++) a[i] = j;
   return 0;
}
