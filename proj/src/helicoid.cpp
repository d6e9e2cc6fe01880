#include "vw/helicoid.hpp"

#include "vw/error.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace vw {

HelicoidConfig HelicoidConfig::default_instance() {
  HelicoidConfig c;
  c.chi = [](double t) { return 1.5 + 0.1 * std::sin(t); };
  c.chi1 = [](double t) { return 0.1 * std::cos(t); };
  c.chi2 = [](double t) { return -0.1 * std::sin(t); };
  c.chi3 = [](double t) { return -0.1 * std::cos(t); };
  c.k = 60.0;
  c.t0 = -50.0;
  c.t1 = 50.0;
  c.t_sequence = {-0.5, -1.0, -1.5, -2.0, -2.5};
  c.shooting.integ.rtol = 1e-11;
  c.shooting.integ.atol = 1e-13;
  c.shooting.param_tol = 0.0;
  c.shooting.anchor_tol = 1e-7;
  c.shooting.horizon = 6.0;
  c.shooting.stitch_spacing = 1.0;
  return c;
}

void HelicoidConfig::validate() const {
  if (!chi || !chi1 || !chi2 || !chi3)
    throw std::invalid_argument("HelicoidConfig: chi and three derivatives are required");
  if (!(k >= 1.0)) throw Error(ErrorCode::HypothesisViolated, "k must be at least 1");
  if (!(t1 > t0)) throw std::invalid_argument("HelicoidConfig: empty window");
  if (eta_samples < 2) throw std::invalid_argument("HelicoidConfig: eta_samples must be >= 2");
}

HelicoidEtas helicoid_etas(const HelicoidConfig& cfg) {
  cfg.validate();
  HelicoidEtas e;
  e.chi_star = kInf;
  const std::size_t n = cfg.eta_samples;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = cfg.t0 + (cfg.t1 - cfg.t0) * static_cast<double>(i) / static_cast<double>(n - 1);
    const double c = cfg.chi(t);
    e.chi_star = std::min(e.chi_star, c);
    e.eta1 = std::max(e.eta1, std::abs(cfg.chi1(t) / c));
    e.eta2 = std::max(e.eta2, std::abs(cfg.chi2(t) / c));
    e.eta3 = std::max(e.eta3, std::abs(cfg.chi3(t) / c));
  }
  e.eta1 *= cfg.eta_inflation;
  e.eta2 *= cfg.eta_inflation;
  e.eta3 *= cfg.eta_inflation;
  return e;
}

namespace {

struct Coeffs {
  double chi, chi1, chi2, chi3, xi, xi1;
};

Coeffs coeffs(const HelicoidConfig& c, double t) {
  Coeffs s;
  s.chi = c.chi(t);
  s.chi1 = c.chi1(t);
  s.chi2 = c.chi2(t);
  s.chi3 = c.chi3(t);
  s.xi = s.chi * s.chi - s.chi * s.chi2 / (2.0 * c.k);
  s.xi1 = 2.0 * s.chi * s.chi1 - (s.chi1 * s.chi2 + s.chi * s.chi3) / (2.0 * c.k);
  return s;
}

}  // namespace

LagrangianSystem build_helicoid(const HelicoidConfig& cfg) {
  cfg.validate();
  const HelicoidEtas e = helicoid_etas(cfg);
  if (!(e.chi_star >= 1.0)) throw Error(ErrorCode::HypothesisViolated, "inf chi must be at least 1");
  if (!(e.eta2 <= cfg.k)) throw Error(ErrorCode::HypothesisViolated, "eta2 must not exceed k");
  for (std::size_t i = 0; i < cfg.eta_samples; ++i) {
    const double t =
        cfg.t0 + (cfg.t1 - cfg.t0) * static_cast<double>(i) / static_cast<double>(cfg.eta_samples - 1);
    const Coeffs s = coeffs(cfg, t);
    if (!(s.xi > 0.5 * s.chi * s.chi))
      throw Error(ErrorCode::HypothesisViolated, "xi(t) > chi(t)^2 / 2 fails", t, Vec());
  }

  const HelicoidConfig c = cfg;
  const double k = cfg.k;
  LagrangianSystem L;
  L.m = 2;
  L.A = [c](double t, const Vec& q) {
    const double ch = c.chi(t);
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = ch * ch + q[0] * q[0];
    return A;
  };
  L.A_t = [c](double t, const Vec&) {
    Mat A = Mat::Zero(2, 2);
    A(1, 1) = 2.0 * c.chi(t) * c.chi1(t);
    return A;
  };
  L.A_q = [](double, const Vec& q) {
    Mat A0 = Mat::Zero(2, 2);
    A0(1, 1) = 2.0 * q[0];
    return std::vector<Mat>{A0, Mat::Zero(2, 2)};
  };
  L.Phi = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double w = q[0] * q[0] + s.chi * s.chi * q[1] * q[1];
    return k * (q[0] * q[0] + s.xi * q[1] * q[1] + w * w) - s.chi * q[1];
  };
  L.Phi_q = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double w = q[0] * q[0] + s.chi * s.chi * q[1] * q[1];
    Vec g(2);
    g[0] = 2.0 * k * q[0] * (1.0 + 2.0 * w);
    g[1] = 2.0 * k * q[1] * (s.xi + 2.0 * s.chi * s.chi * w) - s.chi;
    return g;
  };
  L.Phi_t = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double w = q[0] * q[0] + s.chi * s.chi * q[1] * q[1];
    const double w1 = 2.0 * s.chi * s.chi1 * q[1] * q[1];
    return k * (s.xi1 * q[1] * q[1] + 2.0 * w * w1) - s.chi1 * q[1];
  };
  L.Phi_qq = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double c2 = s.chi * s.chi;
    const double w = q[0] * q[0] + c2 * q[1] * q[1];
    Mat H(2, 2);
    H(0, 0) = 2.0 * k * (1.0 + 2.0 * w + 4.0 * q[0] * q[0]);
    H(0, 1) = H(1, 0) = 8.0 * k * c2 * q[0] * q[1];
    H(1, 1) = 2.0 * k * (s.xi + 2.0 * c2 * w + 4.0 * c2 * c2 * q[1] * q[1]);
    return H;
  };
  L.Psi = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double w = q[0] * q[0] + s.chi * s.chi * q[1] * q[1];
    return k * (q[0] * q[0] + s.xi * q[1] * q[1] + 2.0 * w * w);
  };
  L.Psi_q = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double w = q[0] * q[0] + s.chi * s.chi * q[1] * q[1];
    Vec g(2);
    g[0] = 2.0 * k * q[0] * (1.0 + 4.0 * w);
    g[1] = 2.0 * k * q[1] * (s.xi + 4.0 * s.chi * s.chi * w);
    return g;
  };
  L.Psi_t = [c, k](double t, const Vec& q) {
    const Coeffs s = coeffs(c, t);
    const double w = q[0] * q[0] + s.chi * s.chi * q[1] * q[1];
    const double w1 = 2.0 * s.chi * s.chi1 * q[1] * q[1];
    return k * (s.xi1 * q[1] * q[1] + 4.0 * w * w1);
  };
  return L;
}

VectorField helicoid_field(const HelicoidConfig& cfg) {
  cfg.validate();
  const HelicoidConfig c = cfg;
  const double k = cfg.k;
  VectorField f;
  f.dim = 4;
  f.f = [c, k](double t, const Vec& x) {
    const Coeffs s = coeffs(c, t);
    const double q1 = x[0], q2 = x[1], v1 = x[2], v2 = x[3];
    const double c2 = s.chi * s.chi;
    const double w = q1 * q1 + c2 * q2 * q2;
    const double g1 = 2.0 * k * q1 * (1.0 + 2.0 * w);
    const double g2 = 2.0 * k * q2 * (s.xi + 2.0 * c2 * w) - s.chi;
    Vec out(4);
    out[0] = v1;
    out[1] = v2;
    out[2] = q1 * v2 * v2 + g1;
    out[3] = (g2 - 2.0 * (s.chi * s.chi1 + q1 * v1) * v2) / (c2 + q1 * q1);
    return out;
  };
  return f;
}

double helicoid_kappa(double R, double k) {
  return 2.0 - std::pow(R * R * R * 2.0 * k, -0.25);
}

double helicoid_K(double R, double k, const HelicoidEtas& e) {
  const double s2 = std::sqrt(2.0);
  const double k2 = 2.0 * k;
  const double mid = std::pow(k2, 0.75) + std::pow(k2, -0.25) * e.eta2;
  return s2 * (6.0 * std::pow(k2, 0.25) + 2.0 / 3.0 * mid) +
         (5.0 * e.eta1 + e.eta3) * std::pow(R, -0.25) +
         s2 * (4.0 / 3.0 * mid + 1.0) * std::pow(R, -0.75);
}

double helicoid_r(double R, double k, double kappa, double K) {
  const double inner = 3.0 * std::sqrt(2.0) * R * K / (4.0 * kappa * std::sqrt(k)) + std::pow(R, 0.75);
  return std::pow(inner, 4.0 / 3.0);
}

HelicoidConstants helicoid_constants(const HelicoidConfig& cfg) {
  HelicoidConstants h;
  h.etas = helicoid_etas(cfg);
  const HelicoidEtas& e = h.etas;
  const double k = cfg.k;
  h.k = k;
  h.R = std::cbrt(1.0 / (2.0 * k));
  h.kappa = helicoid_kappa(h.R, k);
  h.K = helicoid_K(h.R, k, e);
  h.K_rounded = (17.15 + 5.3 * e.eta1 + 1.28 * e.eta2 + 1.1 * e.eta3) * k;
  h.r = helicoid_r(h.R, k, h.kappa, h.K);
  h.C = std::pow(15.28 + 4.47 * e.eta1 + 1.08 * e.eta2 + 0.93 * e.eta3, 4.0 / 3.0);
  h.C_k29 = h.C * std::pow(k, 2.0 / 9.0);
  h.C_recomputed = h.r / std::pow(k, 2.0 / 9.0);
  h.chain_holds = h.r <= h.C_k29;
  h.q_norm_sq_bound = std::sqrt(h.C / 2.0) * std::pow(k, -7.0 / 18.0);
  h.W_bound = h.R * std::sqrt(2.0 / k);

  const double cs2 = e.chi_star * e.chi_star;
  h.ap_threshold = std::max({1.0, e.eta2,
                             std::pow(9.0 * h.C / (8.0 * cs2 * std::min(1.0, cs2 / 2.0)), 9.0 / 7.0)});
  h.ap_guaranteed = k >= h.ap_threshold;

  LagrangianConstants& lc = h.constants;
  lc.kappa = h.kappa;
  lc.R = h.R;
  lc.theta = h.theta;
  lc.K = h.K;
  lc.Theta_upper = [k](double s) { return 2.0 * s / k; };
  lc.Xi = [](double) { return 0.0; };
  lc.omega0 = -h.W_bound;
  lc.omega_sup = h.W_bound;
  h.W_bound_closed = closed_omega_bound(lc.Theta_upper, lc.Xi, h.R);
  return h;
}

std::function<double(double, const Vec&)> helicoid_alpha2(const HelicoidConfig& cfg) {
  const auto chi = cfg.chi;
  return [chi](double t, const Vec& q) {
    const double c2 = chi(t) * chi(t);
    const double den = c2 + q[0] * q[0];
    return std::max(0.0, 2.0 * (3.0 * q[0] * q[0] - c2) / (den * den * den));
  };
}

HelicoidRun run_helicoid(const HelicoidConfig& cfg) {
  HelicoidRun run;
  run.constants = helicoid_constants(cfg);
  const HelicoidConstants& hc = run.constants;
  const LagrangianSystem L = build_helicoid(cfg);
  const LagrangianVW vw = build_lagrangian_vw(L, hc.constants, cfg.t0);
  const VectorField field = helicoid_field(cfg);

  LimitBounds lb;
  lb.omega0 = hc.constants.omega0;
  lb.omega_sup = hc.constants.omega_sup;
  lb.bound = V_bar(hc.r, hc.theta, hc.R);
  const double centre = 0.5 * (cfg.t0 + cfg.t1);
  ShootingConfig sc = cfg.shooting;
  sc.anchor_time = centre;
  std::vector<double> seq;
  for (double s : cfg.t_sequence) seq.push_back(centre + s);
  run.certificate =
      extract_limit_solution(field, vw.pair, vw.family, seq, 0.5 * (cfg.t1 - cfg.t0), sc, lb);

  ShootingCertificate& cert = run.certificate;
  const Trajectory& traj = cert.trajectory;
  const std::size_t grid = std::max<std::size_t>(20001, traj.size());
  double wt_E = cfg.t0, wt_q = cfg.t0, wt_W = cfg.t0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = traj.t_begin() + (traj.t_end() - traj.t_begin()) * static_cast<double>(i) /
                                          static_cast<double>(grid - 1);
    const Vec x = traj.evaluate(t);
    const Vec q = x.head(2), qd = x.tail(2);
    const double E = L.energy(t, q, qd);
    const double qq = q.squaredNorm();
    const double W = std::abs(vw.pair.W(t, x));
    if (E > run.sup_energy) { run.sup_energy = E; wt_E = t; }
    if (qq > run.sup_q_norm_sq) { run.sup_q_norm_sq = qq; wt_q = t; }
    if (W > run.sup_abs_W) { run.sup_abs_W = W; wt_W = t; }
    run.sup_state_norm = std::max(run.sup_state_norm, x.norm());
  }
  auto add = [&](const std::string& name, double measured, double bound, double wt) {
    CertificateEntry e;
    e.name = name;
    e.measured = measured;
    e.bound = bound;
    e.margin = bound - measured;
    const double slack = 1e-6 * (1.0 + std::abs(bound));
    e.status = measured <= bound + slack ? Status::Pass : Status::Fail;
    if (e.status == Status::Fail) {
      e.witness_t = wt;
      cert.status = Status::Fail;
      if (!cert.witness_t) {
        cert.witness_t = wt;
        cert.witness_x = traj.evaluate(wt);
      }
    }
    cert.entries.push_back(e);
  };
  add("energy", run.sup_energy, hc.r, wt_E);
  add("q_norm_sq", run.sup_q_norm_sq, hc.q_norm_sq_bound, wt_q);
  add("abs_W", run.sup_abs_W, hc.W_bound, wt_W);

  std::vector<double> taus;
  const int nt = static_cast<int>(std::floor(cfg.tau_max / cfg.tau_step + 0.5));
  for (int i = 0; i <= nt; ++i) taus.push_back(cfg.tau_step * i);
  const double span = traj.t_end() - traj.t_begin();
  const auto samples = static_cast<std::size_t>(std::llround(span / (0.5 * cfg.tau_step))) + 1;
  run.ap = almost_period_scan(traj, cfg.ap_epsilon, taus, cfg.span_factor, samples);
  run.ap_label = hc.ap_guaranteed ? "evidence" : "not guaranteed";
  return run;
}

}  // namespace vw
