#pragma once

#include "vw/lagrangian.hpp"
#include "vw/shooting.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vw {

// Particle on the vibrating helicoid r = (q1 cos q2, q1 sin q2, chi(t) q2) in a
// repelling field of strength k.
struct HelicoidConfig {
  std::function<double(double)> chi, chi1, chi2, chi3;  // chi and its first three derivatives
  double k = 60.0;
  double t0 = -50.0, t1 = 50.0;
  std::size_t eta_samples = 10000;
  double eta_inflation = 1.02;

  ShootingConfig shooting;
  std::vector<double> t_sequence;
  double ap_epsilon = 1e-2;
  double tau_max = 40.0;
  double tau_step = 0.01;
  double span_factor = 2.5;

  // chi = 1.5 + 0.1 sin t, k = 60 on [-50, 50].
  static HelicoidConfig default_instance();
  void validate() const;
};

struct HelicoidEtas {
  double chi_star = 0.0;
  double eta1 = 0.0, eta2 = 0.0, eta3 = 0.0;
};

HelicoidEtas helicoid_etas(const HelicoidConfig& cfg);

LagrangianSystem build_helicoid(const HelicoidConfig& cfg);

// Euler-Lagrange field written out for the helicoid; agrees with el_field.
VectorField helicoid_field(const HelicoidConfig& cfg);

double helicoid_kappa(double R, double k);
double helicoid_K(double R, double k, const HelicoidEtas& e);
double helicoid_r(double R, double k, double kappa, double K);

struct HelicoidConstants {
  HelicoidEtas etas;
  double k = 0.0;
  double R = 0.0;
  double kappa = 0.0;
  double theta = 0.25;
  double K = 0.0;
  double K_rounded = 0.0;      // (17.15 + 5.3 eta1 + 1.28 eta2 + 1.1 eta3) k
  double r = 0.0;              // energy bound r(k, R)
  double C = 0.0;              // (15.28 + 4.47 eta1 + 1.08 eta2 + 0.93 eta3)^{4/3}
  double C_recomputed = 0.0;   // r / k^{2/9}
  double C_k29 = 0.0;          // C k^{2/9}
  bool chain_holds = false;    // r <= C k^{2/9}
  double q_norm_sq_bound = 0.0;  // sqrt(C/2) k^{-7/18}
  double W_bound = 0.0;          // R sqrt(2/k)
  double W_bound_closed = 0.0;   // closed bound recomputed from Theta = 2 Psi / k
  double ap_threshold = 0.0;
  bool ap_guaranteed = false;
  LagrangianConstants constants;
};

HelicoidConstants helicoid_constants(const HelicoidConfig& cfg);

// alpha2 of the convexity quadratic test for the helicoid: max(2(3 q1^2 - chi^2)/(chi^2 + q1^2)^3, 0).
std::function<double(double, const Vec&)> helicoid_alpha2(const HelicoidConfig& cfg);

struct HelicoidRun {
  HelicoidConstants constants;
  ShootingCertificate certificate;
  AlmostPeriodScan ap;
  std::string ap_label;  // "evidence" or "not guaranteed"
  double sup_energy = 0.0;
  double sup_q_norm_sq = 0.0;
  double sup_abs_W = 0.0;
  double sup_state_norm = 0.0;  // sup |(q, qd)|; any shift has defect at most twice this
};

HelicoidRun run_helicoid(const HelicoidConfig& cfg);

}  // namespace vw
