#pragma once

// Randomized property suites shared by the unit tests and the acceptance
// binary. Every suite draws from a fixed seed.

#include "vw/lagrangian.hpp"
#include "vw/quadform.hpp"

#include <cmath>
#include <random>
#include <string>
#include <vector>

namespace vwprop {

using vw::Mat;
using vw::Vec;

struct Result {
  std::string name;
  int cases = 0;
  int failures = 0;
  double worst = 0.0;  // largest observed error
  bool ok() const { return cases >= 100 && failures == 0; }
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(g_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(g_); }
  Vec vec(int n, double a = -1.0, double b = 1.0) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = uniform(a, b);
    return v;
  }
  Mat mat(int r, int c, double a = -1.0, double b = 1.0) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = uniform(a, b);
    return m;
  }
  // Symmetric with eigenvalues bounded away from zero, both signs when n >= 2.
  Mat indefinite(int n) {
    Eigen::HouseholderQR<Mat> qr(mat(n, n));
    const Mat Q = qr.householderQ();
    Vec lam(n);
    for (int i = 0; i < n; ++i) {
      const double mag = uniform(0.5, 3.0);
      lam[i] = (i % 2 == 0) ? mag : -mag;
    }
    return Q * lam.asDiagonal() * Q.transpose();
  }
  Mat spd(int n) {
    const Mat M = mat(n, n);
    return M * M.transpose() + Mat::Identity(n, n) * uniform(0.5, 2.0);
  }

 private:
  std::mt19937_64 g_;
};

inline void record(Result& r, double err, double tol) {
  ++r.cases;
  r.worst = std::max(r.worst, err);
  if (!(err <= tol)) ++r.failures;
}

// Analytic Lie derivative of a quadratic-plus-forcing U along a linear forced
// field against the finite-difference version.
inline Result lie_derivative_suite(std::uint64_t seed = 101, int cases = 200) {
  Result r{"lie_derivative analytic vs finite difference"};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const int n = rng.integer(1, 4);
    const Mat Q = rng.indefinite(n);
    const Vec b = rng.vec(n);
    const double om = rng.uniform(0.5, 2.0);
    const Mat M = rng.mat(n, n, -2.0, 2.0);
    const Vec f0 = rng.vec(n);
    vw::ScalarField U;
    U.value = [=](double t, const Vec& x) { return x.dot(Q * x) + std::sin(om * t) * b.dot(x); };
    U.grad = [=](double t, const Vec& x) -> Vec { return 2.0 * Q * x + std::sin(om * t) * b; };
    U.dt = [=](double t, const Vec& x) { return om * std::cos(om * t) * b.dot(x); };
    vw::VectorField f;
    f.dim = n;
    f.f = [=](double t, const Vec& x) -> Vec { return M * x + std::cos(t) * f0; };
    const double t = rng.uniform(-5.0, 5.0);
    const Vec x = rng.vec(n, -3.0, 3.0);
    const double a = vw::lie_derivative(U, f, t, x);
    const double d = vw::lie_derivative_fd(U, f, t, x);
    const double scale = std::max(1.0, std::abs(a));
    record(r, std::abs(a - d) / scale, 1e-5);
  }
  return r;
}

inline Result retraction_suite(std::uint64_t seed = 202, int cases = 200) {
  Result r{"fixed_time_retraction level set and idempotence"};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const int n = rng.integer(2, 5);
    const Mat S = rng.indefinite(n);
    const auto path = vw::SymmetricFormPath::constant(S);
    Vec x;
    double q = 0.0;
    do {
      x = rng.vec(n, -2.0, 2.0);
      q = x.dot(S * x);
    } while (!(q > 0.05));
    const double w = rng.uniform(0.1, 5.0);
    x *= std::sqrt(w / q);  // now on {<Sx,x> = w}
    const Vec y = vw::fixed_time_retraction(path, 0.0, w, x);
    const Vec z = vw::fixed_time_retraction(path, 0.0, w, y);
    const double level = std::abs(y.dot(S * y) - w) / (1.0 + w);
    const double idem = (z - y).norm() / (1.0 + y.norm());
    record(r, std::max(level, idem), 1e-10);
  }
  return r;
}

inline Result spectral_split_suite(std::uint64_t seed = 303, int cases = 200) {
  Result r{"spectral_split reconstruction"};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const int n = rng.integer(1, 6);
    const Mat S = rng.indefinite(n);
    const vw::SpectralSplit sp = vw::spectral_split(S);
    const Mat back = sp.eigenvectors * sp.eigenvalues.asDiagonal() * sp.eigenvectors.transpose();
    const double proj = (sp.P_plus + sp.P_minus - Mat::Identity(n, n)).norm();
    record(r, std::max((back - S).norm() / S.norm(), proj), 1e-10);
  }
  return r;
}

inline Result legendre_suite(std::uint64_t seed = 404, int cases = 200) {
  Result r{"Legendre round trip"};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const int m = rng.integer(1, 4);
    const Mat A0 = rng.spd(m);
    const Mat G = rng.mat(m, m);
    vw::LagrangianSystem L;
    L.m = m;
    L.A = [A0](double t, const Vec& q) {
      return Mat(A0 * (1.0 + 0.1 * std::sin(t)) + q.squaredNorm() * Mat::Identity(q.size(), q.size()));
    };
    L.a = [G](double t, const Vec& q) -> Vec { return std::cos(t) * G * q; };
    L.Phi = [](double, const Vec& q) { return q.squaredNorm(); };
    L.Psi = [](double, const Vec& q) { return q.squaredNorm(); };
    const vw::HamiltonianSystem H(L);
    const double t = rng.uniform(-3.0, 3.0);
    const Vec q = rng.vec(m, -2.0, 2.0), qd = rng.vec(m, -3.0, 3.0);
    const Vec p = H.momentum(t, q, qd);
    const Vec back = H.velocity(t, q, p);
    record(r, (back - qd).norm() / (1.0 + qd.norm()), 1e-10);
  }
  return r;
}

// Scalar systems x' = lambda x + g(t) with |g| <= G and the pair
// V = x^2 - rho^2, W = x^2, rho > G / lambda, so W' > 0 where V > 0 and
// V' = W'. Trajectories from random starts run forward until W nears w^*.
inline Result trajectory_estimates_suite(std::uint64_t seed = 505, int systems = 5,
                                         int per_system = 20) {
  Result r{"V estimates along trajectories"};
  Rng rng(seed);
  for (int s = 0; s < systems; ++s) {
    const double lambda = rng.uniform(0.5, 2.0);
    const double a = rng.uniform(0.1, 1.0), b = rng.uniform(-0.5, 0.5);
    const double om = rng.uniform(0.5, 3.0);
    const double G = a + std::abs(b);
    const double rho = 1.1 * G / lambda + 0.1;
    vw::VectorField f;
    f.dim = 1;
    f.f = [=](double t, const Vec& x) { return Vec::Constant(1, lambda * x[0] + a * std::sin(om * t) + b); };
    vw::VWPair p;
    p.V.value = [rho](double, const Vec& x) { return x[0] * x[0] - rho * rho; };
    p.V.grad = [](double, const Vec& x) { return Vec::Constant(1, 2.0 * x[0]); };
    p.V.dt = [](double, const Vec&) { return 0.0; };
    p.W.value = [](double, const Vec& x) { return x[0] * x[0]; };
    p.W.grad = [](double, const Vec& x) { return Vec::Constant(1, 2.0 * x[0]); };
    p.W.dt = [](double, const Vec&) { return 0.0; };
    p.c_lower = s % 2 == 0 ? vw::kInf : rng.uniform(0.5, 3.0);
    p.c_upper = rng.uniform(1.0, 2.0);
    p.w_lower = -1.0;
    p.w_upper = 9.0 * rho * rho;
    vw::EventSpec stop;
    stop.g = [&p](double t, const Vec& x) { return p.W(t, x) - 0.98 * p.w_upper; };
    stop.terminal = true;
    vw::IntegratorConfig ic;
    ic.rtol = 1e-11;
    ic.atol = 1e-13;
    for (int k = 0; k < per_system; ++k) {
      const double t0 = rng.uniform(-5.0, 5.0);
      const Vec x0 = Vec::Constant(1, rng.uniform(-2.5 * rho, 2.5 * rho));
      const vw::Trajectory tr = vw::integrate(f, t0, x0, t0 + 8.0, ic, {stop}).trajectory;
      vw::TrajectoryCheckOptions opt;
      opt.tol = 1e-7;
      const vw::ConditionReport rep = vw::trajectory_check(p, tr, opt);
      ++r.cases;
      if (rep.status != vw::Status::Pass) ++r.failures;
      if (rep.worst_value > r.worst) r.worst = rep.worst_value;
    }
  }
  return r;
}

inline Result pencil_congruence_suite(std::uint64_t seed = 606, int cases = 200) {
  Result r{"pencil congruence invariance"};
  Rng rng(seed);
  for (int c = 0; c < cases; ++c) {
    const int n = rng.integer(2, 5);
    const Mat S = rng.indefinite(n);
    const Mat B = rng.spd(n);
    Mat P;
    do {
      P = rng.mat(n, n);
    } while (std::abs(P.determinant()) < 0.2);
    const Vec l1 = vw::generalized_eigenvalues(S, B);
    const Vec l2 = vw::generalized_eigenvalues(P.transpose() * S * P, P.transpose() * B * P);
    record(r, (l1 - l2).cwiseAbs().maxCoeff() / (1.0 + l1.cwiseAbs().maxCoeff()), 1e-8);
  }
  return r;
}

inline std::vector<Result> all_suites() {
  return {lie_derivative_suite(), retraction_suite(),          spectral_split_suite(),
          legendre_suite(),       trajectory_estimates_suite(), pencil_congruence_suite()};
}

}  // namespace vwprop
