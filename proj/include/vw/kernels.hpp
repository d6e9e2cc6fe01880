#pragma once

#include <cstddef>

// Array reductions used by the almost-period scan and the certificate sweeps.
// Each kernel has a scalar reference and, on x86-64, an AVX2 variant; the
// dispatcher picks one at first use. Setting VW_FORCE_SCALAR=1 pins the
// scalar path.
namespace vw::kernels {

struct Table {
  double (*max_abs_diff)(const double* a, const double* b, std::size_t n);
  void (*accumulate_sq_diff)(const double* a, const double* b, double* acc, std::size_t n);
  double (*max_value)(const double* a, std::size_t n);
  void (*minmax)(const double* a, std::size_t n, double* lo, double* hi);
};

namespace scalar {
double max_abs_diff(const double* a, const double* b, std::size_t n);
void accumulate_sq_diff(const double* a, const double* b, double* acc, std::size_t n);
double max_value(const double* a, std::size_t n);
void minmax(const double* a, std::size_t n, double* lo, double* hi);
}  // namespace scalar

bool avx2_compiled();
bool avx2_supported();  // compiled in and reported by the CPU
const Table& scalar_table();
const Table& avx2_table();  // falls back to scalar when unavailable
const Table& active();
const char* active_name();

// Convenience wrappers over active().
inline double max_abs_diff(const double* a, const double* b, std::size_t n) {
  return active().max_abs_diff(a, b, n);
}
inline void accumulate_sq_diff(const double* a, const double* b, double* acc, std::size_t n) {
  active().accumulate_sq_diff(a, b, acc, n);
}
inline double max_value(const double* a, std::size_t n) { return active().max_value(a, n); }
inline void minmax(const double* a, std::size_t n, double* lo, double* hi) {
  active().minmax(a, n, lo, hi);
}

}  // namespace vw::kernels
