/* expect: error unsupported directive 'barrier' */
#include <omp.h>
int main(void) {
#  pragma omp parallel
   {
#     pragma omp barrier
   }
   return 0;
}
