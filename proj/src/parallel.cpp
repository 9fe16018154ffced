#include "morph/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace morph {

namespace {
int g_threads = 1;
}

void set_threads(int n) { g_threads = n < 1 ? 1 : n; }

int threads() { return g_threads; }

bool openmp_enabled() {
#ifdef _OPENMP
    return true;
#else
    return false;
#endif
}

}  // namespace morph
