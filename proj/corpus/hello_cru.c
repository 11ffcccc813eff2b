/* hello_cru.c: critical sections, single and the three reductions */
#include <stdio.h>
#include <omp.h>

#define N 64

int main(void) {
   int checked = 0;
   int squares[N];
   int total = 0;
   double prod = 1.0;
   int diff = 0;
   int mine, k, i;

#  pragma omp parallel shared(checked, squares) private(mine, k, i)
   {
      int id = omp_get_thread_num();
      int nt = omp_get_num_threads();

      printf("Hello from thread %d of %d\n", id, nt);
      mine = 0;
      for (k = id * N / nt; k < (id + 1) * N / nt; k++)
         mine += k;
#     pragma omp critical
      checked += mine;
#     pragma omp single
      printf("filling squares\n");
#     pragma omp for
      for (i = 0; i < N; i++)
         squares[i] = i * i;
   }

#  pragma omp parallel for reduction(+: total) shared(squares)
   for (i = 0; i < N; i++)
      total += squares[i];

#  pragma omp parallel for reduction(*: prod)
   for (i = 1; i <= 10; i++)
      prod *= 1.0 + 1.0 / i;

   /* half the cluster */
#  pragma omp parallel for num_threads(4) reduction(-: diff)
   for (i = 0; i < N; i++)
      diff -= i;

   printf("checked = %d\n", checked);
   printf("total = %d\n", total);
   printf("prod = %.12f\n", prod);
   printf("diff = %d\n", diff);
   return 0;
}
