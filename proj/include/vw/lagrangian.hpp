#pragma once

#include "vw/fields.hpp"
#include "vw/shooting.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vw {

// L = 1/2 <A(t,q) qd, qd> + <a(t,q), qd> + Phi(t,q), with comparison
// potential Psi >= 0. Any missing derivative falls back to central
// differences; uses_fd() reports whether that happened.
struct LagrangianSystem {
  int m = 0;
  std::function<Mat(double, const Vec&)> A;
  std::function<Mat(double, const Vec&)> A_t;
  std::function<std::vector<Mat>(double, const Vec&)> A_q;  // entry i: dA/dq_i
  std::function<Vec(double, const Vec&)> a;                 // empty: a = 0
  std::function<Vec(double, const Vec&)> a_t;
  std::function<Mat(double, const Vec&)> a_q;               // column i: da/dq_i
  std::function<double(double, const Vec&)> Phi;
  std::function<Vec(double, const Vec&)> Phi_q;
  std::function<double(double, const Vec&)> Phi_t;
  std::function<Mat(double, const Vec&)> Phi_qq;
  std::function<double(double, const Vec&)> Psi;
  std::function<Vec(double, const Vec&)> Psi_q;
  std::function<double(double, const Vec&)> Psi_t;

  bool has_gyroscopic() const { return static_cast<bool>(a); }
  bool uses_fd() const;

  Mat dA_dt(double t, const Vec& q) const;
  std::vector<Mat> dA_dq(double t, const Vec& q) const;
  Vec a_val(double t, const Vec& q) const;
  Vec da_dt(double t, const Vec& q) const;
  Mat da_dq(double t, const Vec& q) const;
  Vec dPhi_dq(double t, const Vec& q) const;
  double dPhi_dt(double t, const Vec& q) const;
  Mat d2Phi_dq2(double t, const Vec& q) const;
  Vec dPsi_dq(double t, const Vec& q) const;
  double dPsi_dt(double t, const Vec& q) const;

  double lagrangian(double t, const Vec& q, const Vec& qd) const;
  double energy(double t, const Vec& q, const Vec& qd) const;  // 1/2 <A qd, qd> + Psi
  Vec dL_dq(double t, const Vec& q, const Vec& qd) const;
  Vec dL_dqd(double t, const Vec& q, const Vec& qd) const;     // A qd + a
};

// Phase-space field (q, qd) -> (qd, qdd) from the Euler-Lagrange equations.
VectorField el_field(const LagrangianSystem& L);

struct LagrangianConstants {
  double kappa = 0.0;
  double R = 0.0;
  double theta = 0.0;
  double K = 0.0;
  std::function<double(double)> Theta_lower;
  std::function<double(double)> Theta_upper;
  std::function<double(double)> Xi;  // empty: 0
  double omega0 = 0.0;
  double omega_sup = 0.0;

  void validate() const;
};

double V_bar(double r, double theta, double R);
double V_bar_prime(double r, double theta, double R);
double frak_f(double z, double theta, double R);

double R_from_constants(double kappa, double R0, double c1, double c2, double Xi_at_R0);
double K_from_constants(double theta, double c3, double c4, double c5, double c6, double c7,
                        double c8, double R);

struct EnergyBound {
  double global = 0.0;  // from omega0, omega_sup
  double local = 0.0;   // from the window extrema of the tilde bounds
};

EnergyBound energy_bound(const LagrangianConstants& c, double omega0, double omega_sup,
                         double window_sup_w, double window_inf_w);

struct LagrangianVW {
  VWPair pair;
  InitialSetFamily family;
  double alpha_lower = 0.0;  // kappa R
  double nu = 0.0;
};

// w_*, w^* lie 1% beyond [omega0, omega_sup] of the constants.
LagrangianVW build_lagrangian_vw(const LagrangianSystem& L, const LagrangianConstants& c,
                                 double nu_time = 0.0);

// Samples (q, qd) over 2m-dimensional boxes.
ConditionReport check_quasiconvexity(const LagrangianSystem& L, double kappa, double R,
                                     const RegionSampler& sampler, double t0, double t1);

struct TildeWOptions {
  int starts = 20;
  std::uint64_t seed = 5;
  double initial_radius = 1.0;
  double max_radius = 1e6;
  std::function<double(double)> Theta_upper;  // enables the closed bounds
  std::function<double(double)> Xi;
};

struct TildeW {
  double w0 = 0.0;      // numerical minimum
  double w_sup = 0.0;   // numerical maximum
  double closed_lower = -kInf;
  double closed_upper = kInf;
  double radius = 0.0;  // box holding {Psi <= R}
};

// Closed bound max_{s in [0,R]} sqrt(Theta(s)) [sqrt(2(R-s)) + Xi(s)].
double closed_omega_bound(const std::function<double(double)>& Theta_upper,
                          const std::function<double(double)>& Xi, double R);

TildeW tilde_w_bounds(const LagrangianSystem& L, double R, double t, const TildeWOptions& opt = {});

class HamiltonianSystem {
 public:
  explicit HamiltonianSystem(LagrangianSystem L) : L_(std::move(L)) {}

  const LagrangianSystem& lagrangian() const { return L_; }
  int m() const { return L_.m; }

  Vec momentum(double t, const Vec& q, const Vec& qd) const;  // A qd + a
  Vec velocity(double t, const Vec& q, const Vec& p) const;   // A^{-1}(p - a)
  double H(double t, const Vec& z) const;
  Vec grad(double t, const Vec& z) const;  // (dH/dq, dH/dp)
  double dt(double t, const Vec& z) const;
  double Y(double t, const Vec& z) const;
  Mat I() const;
  Mat J() const;
  VectorField field() const;  // J grad H

 private:
  LagrangianSystem L_;
};

struct QuadraticTestOptions {
  bool enabled = true;
  int u_grid = 64;
  std::function<double(double, const Vec&)> alpha2;  // analytic override
};

struct ConvexityCertificate {
  double r = 0.0;
  double d = 1.0;
  double rho_hat = kInf;
  double vartheta = 0.0;
  std::size_t samples = 0;
  std::size_t pairs = 0;
  bool quadratic_test_run = false;
  double quadratic_test_worst = -kInf;  // max of alpha2 u^2 + 2 beta2 u - gamma2 over the u-range
  double alpha1_min = kInf, beta1_max = 0.0, gamma1_min = kInf;
  double alpha2_max = -kInf, beta2_max = 0.0, gamma2_min = kInf;
  Status status = Status::Inconclusive;
  std::optional<double> witness_t;
  Vec witness_z;
  std::vector<std::string> notes;
};

// Sampler boxes are over z = (q, p).
ConvexityCertificate convexity_certificate(const HamiltonianSystem& H, double r, double d,
                                           const RegionSampler& sampler, double t0, double t1,
                                           const QuadraticTestOptions& qt = {});

struct AlmostPeriodScan {
  std::vector<double> tau;
  std::vector<double> defect;
  std::vector<double> accepted;
  double max_gap = kInf;  // between accepted shifts, including the tail of the grid
  double epsilon = 0.0;
};

AlmostPeriodScan almost_period_scan(const Trajectory& traj, double epsilon,
                                    const std::vector<double>& tau_grid, double span_factor = 3.0,
                                    std::size_t samples = 20001);

// Sup of |L| along a trajectory over (q, qd) states.
double lagrangian_sup(const LagrangianSystem& L, const Trajectory& traj, std::size_t grid = 2001);

}  // namespace vw
