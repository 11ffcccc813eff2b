/* expect: error is not listed in a shared, private or reduction clause */
int main(void) {
   int x = 0;
#pragma omp parallel
   {
      x = 1;
   }
   return x;
}
