#pragma once

#include <Eigen/Dense>

#include <functional>

namespace vw {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Right-hand side f(t, x). Jacobian and time derivative are optional.
struct VectorField {
  int dim = 0;
  std::function<Vec(double, const Vec&)> f;
  std::function<Mat(double, const Vec&)> jacobian;
  std::function<Vec(double, const Vec&)> time_derivative;

  Vec operator()(double t, const Vec& x) const { return f(t, x); }
};

// Time-dependent scalar function U(t, x). Missing derivatives fall back to
// central differences.
struct ScalarField {
  std::function<double(double, const Vec&)> value;
  std::function<Vec(double, const Vec&)> grad;
  std::function<double(double, const Vec&)> dt;

  double operator()(double t, const Vec& x) const { return value(t, x); }

  bool has_analytic_gradient() const { return static_cast<bool>(grad); }
  Vec gradient(double t, const Vec& x) const;
  double time_partial(double t, const Vec& x) const;

  Vec fd_gradient(double t, const Vec& x) const;
  double fd_time_partial(double t, const Vec& x) const;
};

// Central-difference step used throughout: max(1e-6, 1e-6 |coordinate|).
inline double fd_step(double coord) {
  const double h = 1e-6 * (coord < 0 ? -coord : coord);
  return h > 1e-6 ? h : 1e-6;
}

// dU/dt along f: partial_t U + <grad_x U, f(t,x)>.
double lie_derivative(const ScalarField& U, const VectorField& field, double t, const Vec& x);

// Same quantity with every derivative taken by central differences.
double lie_derivative_fd(const ScalarField& U, const VectorField& field, double t, const Vec& x);

}  // namespace vw
