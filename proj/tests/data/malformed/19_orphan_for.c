/* expect: error orphaned directive 'for' */
void fill(int *a) {
   int i;
#pragma omp for
   for (i = 0; i < 10; i++) a[i] = i;
}
int main(void) {
   int a[10];
   fill(a);
   return 0;
}
