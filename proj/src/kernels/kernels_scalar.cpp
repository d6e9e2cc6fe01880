#include "vw/kernels.hpp"

#include <cmath>
#include <limits>

namespace vw::kernels::scalar {

// Inputs are expected to be finite; callers check before reducing.

double max_abs_diff(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::fabs(a[i] - b[i]);
    if (d > m) m = d;
  }
  return m;
}

void accumulate_sq_diff(const double* a, const double* b, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc[i] += d * d;
  }
}

double max_value(const double* a, std::size_t n) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    if (a[i] > m) m = a[i];
  return m;
}

void minmax(const double* a, std::size_t n, double* lo, double* hi) {
  double l = std::numeric_limits<double>::infinity();
  double h = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] < l) l = a[i];
    if (a[i] > h) h = a[i];
  }
  *lo = l;
  *hi = h;
}

}  // namespace vw::kernels::scalar
