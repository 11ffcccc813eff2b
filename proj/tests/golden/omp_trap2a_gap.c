/* File:    omp_trap2a.c
 * Purpose: Estimate definite integral (or area under curve) using the
 *          trapezoidal rule.  This version uses a hand-coded reduction
 *          after the function call.
 *
 * Input:   none: a = 0, b = 3 and n = 1024 are fixed
 * Output:  estimate of integral from a to b of f(x)
 *          using n trapezoids.
 *
 * Compile: gcc -g -Wall -fopenmp -o omp_trap2a omp_trap2a.c
 * Usage:   ./omp_trap2a
 *
 * Notes:
 *   1.  The function f(x) is hardwired.
 *   2.  In this version, it's assumed that n is evenly divisible by
 *       the number of threads
 */

#include <stdio.h>
#include <stdlib.h>
#include "gap_shim.h"

static int __omp_num_threads = 1;

void Usage(char* prog_name);
double f(double x);    /* Function we're integrating */
double Local_trap(double a, double b, int n);

typedef struct __omp_region0_args_t {
    double a;
    double b;
    int n;
    double global_result;
    double __omp_partials_global_result[8];
    int fork_width;
} __omp_region0_args_t;

static __omp_region0_args_t __omp_region0_args;

void __omp_region0_worker(void *arg)
{
    __omp_region0_args_t *__omp_args = (__omp_region0_args_t *)arg;
    int __omp_core_id = CLUSTER_CoreId();
    double __omp_red_global_result = 0;
    __omp_red_global_result += Local_trap(__omp_args->a, __omp_args->b, __omp_args->n);
    __omp_args->__omp_partials_global_result[__omp_core_id] = __omp_red_global_result;
    CLUSTER_Barrier();
    if (__omp_core_id == 0) {
        int __omp_k;
        for (__omp_k = 0; __omp_k < __omp_args->fork_width; __omp_k++) {
            __omp_args->global_result += __omp_args->__omp_partials_global_result[__omp_k];
        }
    }
}

void __omp_region0_master(void *arg)
{
    CLUSTER_CoresFork(__omp_region0_worker, arg);
}

int main(int argc, char* argv[]) {
   double  global_result = 0.0;  /* Store result in global_result */
   double  a, b;                 /* Left and right endpoints      */
   int     n;                    /* Total number of trapezoids    */
   int     thread_count;

   if (argc != 1) Usage(argv[0]);
   thread_count = 8;
   a = 0.0;
   b = 3.0;
   n = 1024;
   if (n % thread_count != 0) Usage(argv[0]);
   CLUSTER_Start(0, 8);
   {
       __omp_region0_args.a = a;
       __omp_region0_args.b = b;
       __omp_region0_args.n = n;
       __omp_region0_args.global_result = global_result;
       __omp_region0_args.fork_width = 8;
       __omp_num_threads = 8;
       CLUSTER_SendTask(0, __omp_region0_master, (void *)&__omp_region0_args, 0);
       CLUSTER_Wait(0);
       __omp_num_threads = 1;
       a = __omp_region0_args.a;
       b = __omp_region0_args.b;
       n = __omp_region0_args.n;
       global_result = __omp_region0_args.global_result;
   }
   CLUSTER_Stop(0);

   printf("With n = %d trapezoids, our estimate\n", n);
   printf("of the integral from %f to %f = %.14e\n",
      a, b, global_result);
   return 0;
}  /* main */

/*--------------------------------------------------------------------
 * Function:    Usage
 * Purpose:     Print command line for function and terminate
 * In arg:      prog_name
 */
void Usage(char* prog_name) {

   fprintf(stderr, "usage: %s\n", prog_name);
   fprintf(stderr, "   number of trapezoids must be evenly divisible by\n");
   fprintf(stderr, "   number of threads\n");
   exit(0);
}  /* Usage */

/*------------------------------------------------------------------
 * Function:    f
 * Purpose:     Compute value of function to be integrated
 * Input arg:   x
 * Return val:  f(x)
 */
double f(double x) {
   double return_val;

   return_val = x*x;
   return return_val;
}  /* f */

/*------------------------------------------------------------------
 * Function:    Local_trap
 * Purpose:     Use trapezoidal rule to estimate part of a definite
 *              integral
 * Input args:
 *    a: left endpoint
 *    b: right endpoint
 *    n: number of trapezoids
 * Return val:  estimate of integral from local_a to local_b
 */
double Local_trap(double a, double b, int n) {
   double  h, x, my_result;
   double  local_a, local_b;
   int  i, local_n;
   int my_rank = (__omp_num_threads > 1 ? CLUSTER_CoreId() : 0);
   int thread_count = __omp_num_threads;

   h = (b-a)/n;
   local_n = n/thread_count;
   local_a = a + my_rank*local_n*h;
   local_b = local_a + local_n*h;
   my_result = (f(local_a) + f(local_b))/2.0;
   for (i = 1; i <= local_n-1; i++) {
     x = local_a + i*h;
     my_result += f(x);
   }
   my_result = my_result*h;

   return my_result;
}  /* Local_trap */
