/* expect: error unsupported OpenMP runtime call 'omp_get_wtime' */
#include <omp.h>
int main(void) {
   double t = 0;
#pragma omp parallel shared(t)
   {
      t = omp_get_wtime();
   }
   return (int)t;
}
