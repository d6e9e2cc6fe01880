#pragma once

#include "vw/field.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace vw {

// Brent's root finder on a sign-changing bracket [a, b].
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double xtol = 1e-14, double rtol = 1e-15, int max_iter = 300);

// Expands [a, b] to the right (b -> a + 2(b - a)) until f changes sign or
// b exceeds cap. Returns false when no sign change is found.
bool bracket_right(const std::function<double(double)>& f, double a, double& b, double cap);

// Adaptive Gauss-Kronrod (7, 15) quadrature.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double abs_tol = 1e-13, double rel_tol = 1e-13, int max_depth = 60);

// Maximizes f on [a, b]: dense grid then golden-section polish around the best
// grid point.
double maximize_1d(const std::function<double(double)>& f, double a, double b, int grid = 400,
                   double* argmax = nullptr);

struct NelderMeadOptions {
  double initial_step = 0.1;
  double x_tol = 1e-12;        // simplex diameter
  double f_target = -1e300;    // stop once the best value is at or below this
  int max_iter = 2000;
  int stall_iter = 0;          // > 0: stop after this many iterations without a new best
};

struct OptimizeResult {
  Vec x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

OptimizeResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                           const NelderMeadOptions& opt);

struct BfgsOptions {
  double g_tol = 1e-10;
  double x_tol = 1e-14;
  int max_iter = 500;
};

// Quasi-Newton minimization with backtracking; grad may be empty, in which
// case central differences are used.
OptimizeResult bfgs(const std::function<double(const Vec&)>& f,
                    const std::function<Vec(const Vec&)>& grad, const Vec& x0,
                    const BfgsOptions& opt = {});

// Halton points in [0,1)^d with a seeded Cranley-Patterson rotation; seed 0
// gives the plain sequence.
class Halton {
 public:
  Halton(int dim, std::uint64_t seed);
  Vec next();
  static double radical_inverse(std::uint64_t i, int base);

 private:
  int dim_;
  std::uint64_t index_ = 1;
  std::vector<double> shift_;
};

// Minimal and maximal eigenvalue of a symmetric matrix.
double min_eig(const Mat& S);
double max_eig(const Mat& S);

}  // namespace vw
