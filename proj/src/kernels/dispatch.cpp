#include "vw/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace vw::kernels {

#ifdef VW_HAVE_AVX2
namespace avx2 {
double max_abs_diff(const double* a, const double* b, std::size_t n);
void accumulate_sq_diff(const double* a, const double* b, double* acc, std::size_t n);
double max_value(const double* a, std::size_t n);
void minmax(const double* a, std::size_t n, double* lo, double* hi);
}  // namespace avx2
#endif

bool avx2_compiled() {
#ifdef VW_HAVE_AVX2
  return true;
#else
  return false;
#endif
}

bool avx2_supported() {
#ifdef VW_HAVE_AVX2
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Table& scalar_table() {
  static const Table t{scalar::max_abs_diff, scalar::accumulate_sq_diff, scalar::max_value,
                       scalar::minmax};
  return t;
}

const Table& avx2_table() {
#ifdef VW_HAVE_AVX2
  static const Table t{avx2::max_abs_diff, avx2::accumulate_sq_diff, avx2::max_value,
                       avx2::minmax};
  if (avx2_supported()) return t;
#endif
  return scalar_table();
}

static bool force_scalar() {
  const char* v = std::getenv("VW_FORCE_SCALAR");
  return v != nullptr && *v != '\0' && std::strcmp(v, "0") != 0;
}

const Table& active() {
  static const Table& t = (!force_scalar() && avx2_supported()) ? avx2_table() : scalar_table();
  return t;
}

const char* active_name() { return &active() == &scalar_table() ? "scalar" : "avx2"; }

}  // namespace vw::kernels
