/* File:      omp_pi.c
 * Purpose:   Estimate pi using OpenMP and the formula
 *
 *               pi = 4*[1 - 1/3 + 1/5 - 1/7 + 1/9 - . . . ]
 *
 * Compile:   gcc -g -Wall -fopenmp -o omp_pi omp_pi.c -lm
 * Run:       ./omp_pi
 *
 * Input:     none, n is fixed at 100000 terms
 * Output:    Estimate of pi using the series and the value from the
 *            math library
 */
#include <stdio.h>
#include <stdlib.h>
#include <math.h>
#include <omp.h>

int main(void) {
   long long n = 100000;
   long long i;
   double factor;
   double sum = 0.0;
   int thread_count = 8;

#  pragma omp parallel for num_threads(8) \
      reduction(+: sum) private(factor) shared(n)
   for (i = 0; i < n; i++) {
      if (i % 2 == 0)
         factor = 1.0;
      else
         factor = -1.0;
      sum += factor/(2*i+1);
   }

   sum = 4.0*sum;
   printf("With n = %lld terms and %d threads,\n", n, thread_count);
   printf("   Our estimate of pi = %.14f\n", sum);
   printf("                   pi = %.14f\n", 4.0*atan(1.0));
   return 0;
}  /* main */
