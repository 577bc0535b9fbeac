#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

// single-threaded baseline; parallel test cases raise the count themselves
int main(int argc, char** argv) {
#ifdef _OPENMP
    omp_set_num_threads(1);
#endif
    return doctest::Context(argc, argv).run();
}
