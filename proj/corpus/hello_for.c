/* hello_for.c: split a loop across the team
 *
 * Every iteration reports the thread that ran it.
 */
#include <stdio.h>
#include <omp.h>

int main(void) {
   int i;
   int n = 16;

#  pragma omp parallel num_threads(8) shared(n) private(i)
   {
      int my_rank = omp_get_thread_num();
      printf("Hello from thread %d of %d\n", my_rank, omp_get_num_threads());
#     pragma omp for
      for (i = 0; i < n; i++)
         printf("Thread %d ran iteration %d\n", my_rank, i);
   }

   return 0;
}
