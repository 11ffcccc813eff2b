/* expect: error condition must test the loop variable */
int main(void) {
   int i, j = 0, a[10];
#pragma omp parallel for shared(a, j)
   for (i = 0; j < 10; i++) a[i] = i;
   return 0;
}
