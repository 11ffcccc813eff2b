/* expect: error appears in more than one data-sharing clause */
int main(void) {
   int a = 0;
#pragma omp parallel shared(a) private(a)
   { a = 1; }
   return 0;
}
