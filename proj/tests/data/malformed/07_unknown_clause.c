/* expect: error unknown clause 'colour' */
int main(void) {
#pragma omp parallel colour(red)
   { }
   return 0;
}
