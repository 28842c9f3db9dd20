#include "brd/backend.hpp"

#ifdef BRD_HAVE_OPENMP
#include <omp.h>
#endif

namespace brd {

bool openmp_available() noexcept {
#ifdef BRD_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

Backend default_backend() noexcept { return openmp_available() ? Backend::OpenMP : Backend::Serial; }

int max_threads() noexcept {
#ifdef BRD_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace brd
