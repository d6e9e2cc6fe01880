#include "vw/lagrangian.hpp"

#include "vw/error.hpp"
#include "vw/kernels.hpp"
#include "vw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace vw {

namespace {

double hess_step(double coord) { return 1e-4 * std::max(1.0, std::abs(coord)); }

// Evaluated into the value type: an Eigen expression would outlive its operands.
template <class F>
auto fd_time(const F& f, double t, const Vec& q) {
  using R = std::decay_t<decltype(f(t, q))>;
  const double h = fd_step(t);
  return R((f(t + h, q) - f(t - h, q)) / (2.0 * h));
}

Vec head(const Vec& x, int m) { return x.head(m); }
Vec tail(const Vec& x, int m) { return x.tail(m); }

Vec concat(const Vec& a, const Vec& b) {
  Vec z(a.size() + b.size());
  z << a, b;
  return z;
}

// Cube [0,1]^p onto the closed unit ball, boundary to boundary.
Vec cube_to_ball(const Vec& u) {
  Vec z = 2.0 * u.array() - 1.0;
  if (z.size() > 1) {
    const double e = z.norm();
    if (e > 0.0) z *= z.cwiseAbs().maxCoeff() / e;
  }
  return z;
}

std::pair<double, double> margins(double lo, double hi) {
  const double span = hi - lo;
  const double dl = lo != 0.0 ? 0.01 * std::abs(lo) : 0.01 * span;
  const double dh = hi != 0.0 ? 0.01 * std::abs(hi) : 0.01 * span;
  return {lo - dl, hi + dh};
}

}  // namespace

bool LagrangianSystem::uses_fd() const {
  return !A_t || !A_q || (a && (!a_t || !a_q)) || !Phi_q || !Phi_t || !Psi_q || !Psi_t;
}

Mat LagrangianSystem::dA_dt(double t, const Vec& q) const {
  if (A_t) return A_t(t, q);
  return fd_time([this](double s, const Vec& x) { return A(s, x); }, t, q);
}

std::vector<Mat> LagrangianSystem::dA_dq(double t, const Vec& q) const {
  if (A_q) return A_q(t, q);
  std::vector<Mat> out;
  for (int i = 0; i < m; ++i) {
    const double h = fd_step(q[i]);
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    out.push_back((A(t, qp) - A(t, qm)) / (2.0 * h));
  }
  return out;
}

Vec LagrangianSystem::a_val(double t, const Vec& q) const {
  return a ? a(t, q) : Vec::Zero(m);
}

Vec LagrangianSystem::da_dt(double t, const Vec& q) const {
  if (!a) return Vec::Zero(m);
  if (a_t) return a_t(t, q);
  return fd_time([this](double s, const Vec& x) { return a(s, x); }, t, q);
}

Mat LagrangianSystem::da_dq(double t, const Vec& q) const {
  if (!a) return Mat::Zero(m, m);
  if (a_q) return a_q(t, q);
  Mat J(m, m);
  for (int i = 0; i < m; ++i) {
    const double h = fd_step(q[i]);
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    J.col(i) = (a(t, qp) - a(t, qm)) / (2.0 * h);
  }
  return J;
}

Vec LagrangianSystem::dPhi_dq(double t, const Vec& q) const {
  if (Phi_q) return Phi_q(t, q);
  Vec g(m);
  for (int i = 0; i < m; ++i) {
    const double h = fd_step(q[i]);
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    g[i] = (Phi(t, qp) - Phi(t, qm)) / (2.0 * h);
  }
  return g;
}

double LagrangianSystem::dPhi_dt(double t, const Vec& q) const {
  if (Phi_t) return Phi_t(t, q);
  return fd_time([this](double s, const Vec& x) { return Phi(s, x); }, t, q);
}

Mat LagrangianSystem::d2Phi_dq2(double t, const Vec& q) const {
  if (Phi_qq) return Phi_qq(t, q);
  Mat Hs(m, m);
  if (Phi_q) {
    for (int i = 0; i < m; ++i) {
      const double h = fd_step(q[i]);
      Vec qp = q, qm = q;
      qp[i] += h;
      qm[i] -= h;
      Hs.col(i) = (Phi_q(t, qp) - Phi_q(t, qm)) / (2.0 * h);
    }
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double hi = hess_step(q[i]), hj = hess_step(q[j]);
        Vec pp = q, pm = q, mp = q, mm = q;
        pp[i] += hi; pp[j] += hj;
        pm[i] += hi; pm[j] -= hj;
        mp[i] -= hi; mp[j] += hj;
        mm[i] -= hi; mm[j] -= hj;
        Hs(i, j) = (Phi(t, pp) - Phi(t, pm) - Phi(t, mp) + Phi(t, mm)) / (4.0 * hi * hj);
      }
  }
  return 0.5 * (Hs + Hs.transpose());
}

Vec LagrangianSystem::dPsi_dq(double t, const Vec& q) const {
  if (Psi_q) return Psi_q(t, q);
  Vec g(m);
  for (int i = 0; i < m; ++i) {
    const double h = fd_step(q[i]);
    Vec qp = q, qm = q;
    qp[i] += h;
    qm[i] -= h;
    g[i] = (Psi(t, qp) - Psi(t, qm)) / (2.0 * h);
  }
  return g;
}

double LagrangianSystem::dPsi_dt(double t, const Vec& q) const {
  if (Psi_t) return Psi_t(t, q);
  return fd_time([this](double s, const Vec& x) { return Psi(s, x); }, t, q);
}

double LagrangianSystem::lagrangian(double t, const Vec& q, const Vec& qd) const {
  return 0.5 * qd.dot(A(t, q) * qd) + a_val(t, q).dot(qd) + Phi(t, q);
}

double LagrangianSystem::energy(double t, const Vec& q, const Vec& qd) const {
  return 0.5 * qd.dot(A(t, q) * qd) + Psi(t, q);
}

Vec LagrangianSystem::dL_dq(double t, const Vec& q, const Vec& qd) const {
  const std::vector<Mat> Aq = dA_dq(t, q);
  const Mat aq = da_dq(t, q);
  Vec g = dPhi_dq(t, q);
  for (int j = 0; j < m; ++j) g[j] += 0.5 * qd.dot(Aq[j] * qd) + aq.col(j).dot(qd);
  return g;
}

Vec LagrangianSystem::dL_dqd(double t, const Vec& q, const Vec& qd) const {
  return A(t, q) * qd + a_val(t, q);
}

VectorField el_field(const LagrangianSystem& L) {
  if (L.m <= 0 || !L.A || !L.Phi) throw std::invalid_argument("el_field: m, A and Phi are required");
  VectorField f;
  f.dim = 2 * L.m;
  f.f = [L](double t, const Vec& x) {
    const int m = L.m;
    const Vec q = x.head(m), qd = x.tail(m);
    const Mat A = L.A(t, q);
    const std::vector<Mat> Aq = L.dA_dq(t, q);
    const Mat aq = L.da_dq(t, q);
    Vec rhs = L.dL_dq(t, q, qd) - L.dA_dt(t, q) * qd - L.da_dt(t, q);
    for (int i = 0; i < m; ++i) rhs -= qd[i] * (Aq[i] * qd + aq.col(i));
    Eigen::LLT<Mat> llt(A);
    if (llt.info() != Eigen::Success || !(llt.matrixL().toDenseMatrix().diagonal().minCoeff() > 0.0))
      throw Error(ErrorCode::SingularKinetic, "kinetic matrix is not positive definite", t, x);
    Vec out(2 * m);
    out << qd, llt.solve(rhs);
    return out;
  };
  return f;
}

void LagrangianConstants::validate() const {
  if (!(kappa > 0.0)) throw Error(ErrorCode::ConstantsInvalid, "kappa must be positive");
  if (!(R > 0.0)) throw Error(ErrorCode::ConstantsInvalid, "R must be positive");
  if (!(K > 0.0)) throw Error(ErrorCode::ConstantsInvalid, "K must be positive");
  if (!(theta >= 0.0 && theta <= 1.0))
    throw Error(ErrorCode::ConstantsInvalid, "theta must lie in [0, 1]");
  if (!(omega0 <= omega_sup)) throw Error(ErrorCode::ConstantsInvalid, "omega0 exceeds omega_sup");
  if (Theta_lower && Theta_upper) {
    for (int i = 0; i <= 64; ++i) {
      const double s = 4.0 * R * i / 64.0;
      if (Theta_lower(s) > Theta_upper(s) * (1.0 + 1e-12) + 1e-15)
        throw Error(ErrorCode::ConstantsInvalid, "Theta_lower exceeds Theta_upper");
    }
  }
}

double V_bar(double r, double theta, double R) {
  if (r < R) return std::pow(R, -theta) * (r - R);
  if (theta == 1.0) return std::log(r / R);
  return (std::pow(r, 1.0 - theta) - std::pow(R, 1.0 - theta)) / (1.0 - theta);
}

double V_bar_prime(double r, double theta, double R) {
  return std::pow(std::max(r, R), -theta);
}

double frak_f(double z, double theta, double R) {
  if (theta == 1.0) return R * std::exp(z);
  const double base = (1.0 - theta) * z + std::pow(R, 1.0 - theta);
  if (!(base > 0.0)) return 0.0;
  return std::pow(base, 1.0 / (1.0 - theta));
}

double R_from_constants(double kappa, double R0, double c1, double c2, double Xi_at_R0) {
  const double s = c2 + Xi_at_R0;
  const double root =
      (std::sqrt(2.0) * s + std::sqrt(2.0 * s * s + 4.0 * kappa * (c1 + kappa * R0))) / (2.0 * kappa);
  return R0 + root * root;
}

double K_from_constants(double theta, double c3, double c4, double c5, double c6, double c7,
                        double c8, double R) {
  const double s2 = std::sqrt(2.0);
  return c3 + s2 * c5 + c7 +
         std::pow(R, -theta) * (c4 + s2 * std::pow(R, -0.5) * c6 + c8 / R);
}

EnergyBound energy_bound(const LagrangianConstants& c, double omega0, double omega_sup,
                         double window_sup_w, double window_inf_w) {
  const double s = c.K / (2.0 * c.kappa);
  EnergyBound b;
  b.global = frak_f(s * (omega_sup - omega0), c.theta, c.R);
  b.local = frak_f(s * (window_sup_w - window_inf_w), c.theta, c.R);
  return b;
}

LagrangianVW build_lagrangian_vw(const LagrangianSystem& L, const LagrangianConstants& c,
                                 double nu_time) {
  c.validate();
  const int m = L.m;
  LagrangianVW out;
  VWPair& p = out.pair;

  p.W.value = [L, m](double t, const Vec& x) {
    const Vec q = x.head(m), qd = x.tail(m);
    return (L.A(t, q) * qd + L.a_val(t, q)).dot(q);
  };
  p.W.grad = [L, m](double t, const Vec& x) {
    const Vec q = x.head(m), qd = x.tail(m);
    const Mat A = L.A(t, q);
    const std::vector<Mat> Aq = L.dA_dq(t, q);
    const Mat aq = L.da_dq(t, q);
    Vec gq = A * qd + L.a_val(t, q);
    for (int j = 0; j < m; ++j) gq[j] += (Aq[j] * qd + aq.col(j)).dot(q);
    return concat(gq, A * q);
  };
  p.W.dt = [L, m](double t, const Vec& x) {
    const Vec q = x.head(m), qd = x.tail(m);
    return (L.dA_dt(t, q) * qd + L.da_dt(t, q)).dot(q);
  };

  const double theta = c.theta, R = c.R;
  p.V.value = [L, m, theta, R](double t, const Vec& x) {
    return V_bar(L.energy(t, x.head(m), x.tail(m)), theta, R);
  };
  p.V.grad = [L, m, theta, R](double t, const Vec& x) {
    const Vec q = x.head(m), qd = x.tail(m);
    const double s = V_bar_prime(L.energy(t, q, qd), theta, R);
    const std::vector<Mat> Aq = L.dA_dq(t, q);
    Vec gq = L.dPsi_dq(t, q);
    for (int j = 0; j < m; ++j) gq[j] += 0.5 * qd.dot(Aq[j] * qd);
    return concat(s * gq, s * (L.A(t, q) * qd));
  };
  p.V.dt = [L, m, theta, R](double t, const Vec& x) {
    const Vec q = x.head(m), qd = x.tail(m);
    const double s = V_bar_prime(L.energy(t, q, qd), theta, R);
    return s * (0.5 * qd.dot(L.dA_dt(t, q) * qd) + L.dPsi_dt(t, q));
  };

  p.c_lower = p.c_upper = c.K / c.kappa;
  std::tie(p.w_lower, p.w_upper) = margins(c.omega0, c.omega_sup);
  out.alpha_lower = c.kappa * R;

  const double w_up = p.w_upper;
  out.family = [L, m, w_up](double t) {
    InitialSet init;
    init.p = m;
    init.t = t;
    init.map = [L, m, w_up, t](const Vec& u) {
      const Vec z = cube_to_ball(u);
      const double nz = z.norm();
      if (nz == 0.0) {
        const Vec q = Vec::Zero(m);
        return concat(q, Vec(q - L.A(t, q).llt().solve(L.a_val(t, q))));
      }
      const Vec e = z / nz;
      auto rho = [&](double s) { return s * s * e.dot(L.A(t, s * e) * e) - w_up; };
      double b = std::sqrt(w_up / e.dot(L.A(t, Vec::Zero(m)) * e));
      if (!bracket_right(rho, 0.0, b, 1e8))
        throw Error(ErrorCode::EmptyRegion, "initial set boundary not found");
      const double smax = brent_root(rho, 0.0, b);
      const Vec q = nz * smax * e;
      return concat(q, Vec(q - L.A(t, q).llt().solve(L.a_val(t, q))));
    };
    return init;
  };

  const InitialSet init = out.family(nu_time);
  double nu = -kInf;
  const int count = m == 1 ? 201 : 512;
  Halton h(m, 11);
  for (int i = 0; i < count; ++i) {
    const Vec u = m == 1 ? Vec::Constant(1, static_cast<double>(i) / (count - 1)) : h.next();
    const Vec x = init.map(u);
    nu = std::max(nu, p.V(nu_time, x) - p.c_upper * p.W(nu_time, x));
  }
  out.nu = nu;
  p.V_cap = p.c_upper * p.w_upper + std::max(nu, -p.c_upper * p.w_lower);
  return out;
}

ConditionReport check_quasiconvexity(const LagrangianSystem& L, double kappa, double R,
                                     const RegionSampler& sampler, double t0, double t1) {
  ConditionReport rep;
  rep.condition = "quasiconvexity";
  const int m = L.m;
  double worst_energy = -kInf, worst_matrix = -kInf;
  std::size_t energy_samples = 0;
  double worst = -kInf;
  auto record = [&](double v, double t, const Vec& x) {
    if (v > worst) {
      worst = v;
      rep.witness_t = t;
      rep.witness_x = x;
    }
  };
  for (double t : sampler.times(t0, t1)) {
    for (const Vec& x : sampler.samples(t)) {
      const Vec q = x.head(m), qd = x.tail(m);
      ++rep.samples;
      const Mat A = L.A(t, q);
      Mat M = A;
      const std::vector<Mat> Aq = L.dA_dq(t, q);
      for (int i = 0; i < m; ++i) M += 0.5 * q[i] * Aq[i];
      M = 0.5 * (M + M.transpose()) - 0.25 * kappa * A;
      Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(M, A, Eigen::EigenvaluesOnly);
      const double mat_violation = -ges.eigenvalues().minCoeff();
      worst_matrix = std::max(worst_matrix, mat_violation);
      record(mat_violation - 1e-9, t, x);

      const double E = L.energy(t, q, qd);
      if (E < R) continue;
      ++energy_samples;
      const double lhs = L.dL_dq(t, q, qd).dot(q) + L.dL_dqd(t, q, qd).dot(qd);
      const double violation = kappa * E - lhs;
      const double tol = 1e-9 * (1.0 + std::abs(lhs) + std::abs(kappa * E));
      worst_energy = std::max(worst_energy, violation);
      record(violation - tol, t, x);
    }
  }
  if (energy_samples == 0)
    throw Error(ErrorCode::EmptyRegion, "no samples with energy at or above R");
  rep.worst_value = worst;
  rep.status = worst <= 0.0 ? Status::Pass : Status::Fail;
  rep.constants["energy_margin_worst"] = worst_energy;
  rep.constants["matrix_margin_worst"] = worst_matrix;
  rep.constants["energy_samples"] = static_cast<double>(energy_samples);
  if (L.uses_fd()) rep.notes.push_back("finite-difference derivatives in use");
  return rep;
}

double closed_omega_bound(const std::function<double(double)>& Theta_upper,
                          const std::function<double(double)>& Xi, double R) {
  if (R <= 0.0) return 0.0;
  auto g = [&](double s) {
    const double th = std::max(0.0, Theta_upper(s));
    return std::sqrt(th) * (std::sqrt(2.0 * std::max(0.0, R - s)) + (Xi ? Xi(s) : 0.0));
  };
  return maximize_1d(g, 0.0, R);
}

TildeW tilde_w_bounds(const LagrangianSystem& L, double R, double t, const TildeWOptions& opt) {
  const int m = L.m;
  TildeW out;
  if (opt.Theta_upper) {
    out.closed_upper = closed_omega_bound(opt.Theta_upper, opt.Xi, R);
    out.closed_lower = -out.closed_upper;
  }
  if (R <= 0.0) {
    out.w0 = out.w_sup = 0.0;
    return out;
  }

  // Grow a sphere until Psi exceeds R on all of it.
  double radius = opt.initial_radius;
  for (;;) {
    bool inside = false;
    Halton h(m, 3);
    const int dirs = m == 1 ? 2 : 512;
    for (int i = 0; i < dirs && !inside; ++i) {
      Vec e;
      if (m == 1) {
        e = Vec::Constant(1, i == 0 ? 1.0 : -1.0);
      } else {
        e = 2.0 * h.next().array() - 1.0;
        if (e.norm() == 0.0) continue;
        e.normalize();
      }
      if (L.Psi(t, radius * e) <= R) inside = true;
    }
    if (!inside) break;
    radius *= 2.0;
    if (radius > opt.max_radius)
      throw Error(ErrorCode::UnboundedSublevel, "sublevel set of Psi does not fit the search box");
  }
  out.radius = radius;

  auto objective = [&](const Vec& q, double sign) {
    const double psi = L.Psi(t, q);
    const double lin = L.a_val(t, q).dot(q);
    if (psi > R) return -sign * lin + 1e3 * (psi - R) * (1.0 + std::abs(lin));
    const double root = std::sqrt(2.0 * (R - psi) * std::max(0.0, q.dot(L.A(t, q) * q)));
    return -sign * (lin + sign * root);
  };

  std::vector<Vec> starts;
  Halton h(m, opt.seed);
  for (int i = 0; i < 50 * opt.starts && static_cast<int>(starts.size()) < opt.starts; ++i) {
    const Vec q = radius * (2.0 * h.next().array() - 1.0).matrix();
    if (L.Psi(t, q) <= R) starts.push_back(q);
  }
  if (L.Psi(t, Vec::Zero(m)) <= R) starts.push_back(Vec::Zero(m));
  if (starts.empty()) throw Error(ErrorCode::EmptyRegion, "no point with Psi <= R found");

  NelderMeadOptions nm;
  nm.initial_step = 0.1 * radius;
  nm.x_tol = 1e-10 * radius;
  nm.max_iter = 4000;
  double best_max = -kInf, best_min = kInf;
  for (const Vec& s : starts) {
    const OptimizeResult up = nelder_mead([&](const Vec& q) { return objective(q, 1.0); }, s, nm);
    best_max = std::max(best_max, -up.f);
    const OptimizeResult lo = nelder_mead([&](const Vec& q) { return objective(q, -1.0); }, s, nm);
    best_min = std::min(best_min, lo.f);
  }
  out.w_sup = best_max;
  out.w0 = best_min;
  return out;
}

Vec HamiltonianSystem::momentum(double t, const Vec& q, const Vec& qd) const {
  return L_.dL_dqd(t, q, qd);
}

Vec HamiltonianSystem::velocity(double t, const Vec& q, const Vec& p) const {
  Eigen::LLT<Mat> llt(L_.A(t, q));
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::SingularKinetic, "kinetic matrix is not positive definite");
  return llt.solve(p - L_.a_val(t, q));
}

double HamiltonianSystem::H(double t, const Vec& z) const {
  const int m = L_.m;
  const Vec q = head(z, m), p = tail(z, m);
  const Vec v = velocity(t, q, p);
  return 0.5 * v.dot(p - L_.a_val(t, q)) - L_.Phi(t, q);
}

Vec HamiltonianSystem::grad(double t, const Vec& z) const {
  const int m = L_.m;
  const Vec q = head(z, m), p = tail(z, m);
  const Vec v = velocity(t, q, p);
  const std::vector<Mat> Aq = L_.dA_dq(t, q);
  const Mat aq = L_.da_dq(t, q);
  Vec gq = -L_.dPhi_dq(t, q);
  for (int j = 0; j < m; ++j) gq[j] -= aq.col(j).dot(v) + 0.5 * v.dot(Aq[j] * v);
  return concat(gq, v);
}

double HamiltonianSystem::dt(double t, const Vec& z) const {
  const int m = L_.m;
  const Vec q = head(z, m), p = tail(z, m);
  const Vec v = velocity(t, q, p);
  return -L_.da_dt(t, q).dot(v) - 0.5 * v.dot(L_.dA_dt(t, q) * v) - L_.dPhi_dt(t, q);
}

double HamiltonianSystem::Y(double t, const Vec& z) const {
  const int m = L_.m;
  const Vec q = head(z, m), p = tail(z, m);
  return 0.5 * velocity(t, q, p).dot(p - L_.a_val(t, q)) + L_.Psi(t, q);
}

Mat HamiltonianSystem::I() const {
  const int m = L_.m;
  Mat out = Mat::Identity(2 * m, 2 * m);
  out.topLeftCorner(m, m) *= -1.0;
  return out;
}

Mat HamiltonianSystem::J() const {
  const int m = L_.m;
  Mat out = Mat::Zero(2 * m, 2 * m);
  out.topRightCorner(m, m) = Mat::Identity(m, m);
  out.bottomLeftCorner(m, m) = -Mat::Identity(m, m);
  return out;
}

VectorField HamiltonianSystem::field() const {
  VectorField f;
  f.dim = 2 * L_.m;
  const HamiltonianSystem self = *this;
  f.f = [self](double t, const Vec& z) { return Vec(self.J() * self.grad(t, z)); };
  return f;
}

namespace {

// Sampled max over unit y, eta of the second q-derivative of <A^{-1} y, y>.
double alpha2_fd(const LagrangianSystem& L, double t, const Vec& q) {
  const int m = L.m;
  auto Ainv = [&](const Vec& x) { return Mat(L.A(t, x).inverse()); };
  std::vector<Mat> D(m * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double hi = hess_step(q[i]), hj = hess_step(q[j]);
      Vec pp = q, pm = q, mp = q, mm = q;
      pp[i] += hi; pp[j] += hj;
      pm[i] += hi; pm[j] -= hj;
      mp[i] -= hi; mp[j] += hj;
      mm[i] -= hi; mm[j] -= hj;
      D[i * m + j] = (Ainv(pp) - Ainv(pm) - Ainv(mp) + Ainv(mm)) / (4.0 * hi * hj);
    }
  auto top = [&](const Vec& y) {
    Mat T(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) T(i, j) = y.dot(D[i * m + j] * y);
    return max_eig(0.5 * (T + T.transpose()));
  };
  double best = -kInf;
  if (m == 1) return top(Vec::Ones(1));
  for (int i = 0; i < m; ++i) best = std::max(best, top(Vec::Unit(m, i)));
  Halton h(m, 17);
  for (int k = 0; k < 256; ++k) {
    Vec y = 2.0 * h.next().array() - 1.0;
    if (y.norm() == 0.0) continue;
    best = std::max(best, top(y.normalized()));
  }
  return best;
}

}  // namespace

ConvexityCertificate convexity_certificate(const HamiltonianSystem& Hs, double r, double d,
                                           const RegionSampler& sampler, double t0, double t1,
                                           const QuadraticTestOptions& qt) {
  if (!(r > 0.0) || !(d >= 1.0)) throw std::invalid_argument("convexity_certificate: r > 0, d >= 1");
  const LagrangianSystem& L = Hs.lagrangian();
  const int m = L.m;
  const Mat I = Hs.I();
  ConvexityCertificate cert;
  cert.r = r;
  cert.d = d;
  cert.quadratic_test_run = qt.enabled && !L.has_gyroscopic();
  double Lmax = 0.0, lmin = kInf;

  for (double t : sampler.times(t0, t1)) {
    std::vector<Vec> feasible;
    for (const Vec& z : sampler.samples(t))
      if (Hs.Y(t, z) <= r) feasible.push_back(z);
    cert.samples += feasible.size();
    if (feasible.empty()) continue;

    auto pair_ratio = [&](const Vec& a, const Vec& b) {
      const Vec dz = a - b;
      const double n = dz.norm();
      if (n == 0.0) return;
      const double v = (I * (Hs.grad(t, a) - Hs.grad(t, b))).dot(dz) / std::pow(n, 2.0 * d);
      ++cert.pairs;
      if (v < cert.rho_hat) {
        cert.rho_hat = v;
        cert.witness_t = t;
        cert.witness_z = concat(a, b);
      }
    };
    const auto [lo, hi] = sampler.box(t);
    const double scale = 1e-3 * (hi - lo).norm();
    Halton dir(2 * m, 23);
    for (std::size_t i = 0; i < feasible.size(); ++i) {
      if (i + 1 < feasible.size()) pair_ratio(feasible[i], feasible[i + 1]);
      Vec e = 2.0 * dir.next().array() - 1.0;
      if (e.norm() == 0.0) continue;
      const Vec near = feasible[i] + scale * e.normalized();
      if (Hs.Y(t, near) <= r) pair_ratio(feasible[i], near);
    }

    for (const Vec& z : feasible) {
      const Vec q = z.head(m);
      const double psi = L.Psi(t, q);
      if (psi > r) continue;
      Eigen::SelfAdjointEigenSolver<Mat> es(L.A(t, q), Eigen::EigenvaluesOnly);
      const double Lam = es.eigenvalues().maxCoeff(), lam = es.eigenvalues().minCoeff();
      Lmax = std::max(Lmax, Lam);
      lmin = std::min(lmin, lam);
      if (!cert.quadratic_test_run) continue;
      const double a1 = 1.0 / (2.0 * Lam);
      const double g1 = psi;
      const double a2 = qt.alpha2 ? qt.alpha2(t, q) : alpha2_fd(L, t, q);
      const double g2 = min_eig(2.0 * L.d2Phi_dq2(t, q));
      cert.alpha1_min = std::min(cert.alpha1_min, a1);
      cert.gamma1_min = std::min(cert.gamma1_min, g1);
      cert.alpha2_max = std::max(cert.alpha2_max, a2);
      cert.gamma2_min = std::min(cert.gamma2_min, g2);
      const double umax = std::sqrt(std::max(0.0, r - g1) / a1);
      for (int k = 0; k <= qt.u_grid; ++k) {
        const double u = umax * k / qt.u_grid;
        const double v = a2 * u * u - g2;
        if (v > cert.quadratic_test_worst) cert.quadratic_test_worst = v;
      }
    }
  }
  if (cert.samples == 0) throw Error(ErrorCode::EmptyRegion, "no samples with Y <= r");
  cert.vartheta = lmin > 0.0 ? Lmax / lmin : kInf;

  const bool rho_ok = cert.pairs > 0 && cert.rho_hat > 0.0;
  const bool qt_ok = !cert.quadratic_test_run || cert.quadratic_test_worst < 0.0;
  cert.status = rho_ok && qt_ok ? Status::Pass : Status::Fail;
  if (cert.quadratic_test_run && !qt.alpha2) cert.notes.push_back("alpha2 from finite differences");
  if (L.uses_fd()) cert.notes.push_back("finite-difference derivatives in use");
  cert.notes.push_back("optima over the sublevel set are sampled and may be underestimated");
  return cert;
}

AlmostPeriodScan almost_period_scan(const Trajectory& traj, double epsilon,
                                    const std::vector<double>& tau_grid, double span_factor,
                                    std::size_t samples) {
  if (tau_grid.empty()) throw std::invalid_argument("almost_period_scan: empty tau grid");
  if (samples < 2) throw std::invalid_argument("almost_period_scan: need two samples");
  const double t0 = traj.t_begin(), t1 = traj.t_end(), span = t1 - t0;
  const auto [tau_lo_it, tau_hi_it] = std::minmax_element(tau_grid.begin(), tau_grid.end());
  const double tau_min = *tau_lo_it, tau_max = *tau_hi_it;
  if (tau_min < 0.0) throw std::invalid_argument("almost_period_scan: negative shift");
  if (span < span_factor * tau_max)
    throw Error(ErrorCode::SpanTooShort, "trajectory span is shorter than span_factor * max tau");

  const int n = traj.dim();
  const double h = span / static_cast<double>(samples - 1);
  std::vector<std::vector<double>> X(n, std::vector<double>(samples));
  for (std::size_t i = 0; i < samples; ++i) {
    const double t = i + 1 == samples ? t1 : t0 + h * static_cast<double>(i);
    const Vec x = traj.evaluate(t);
    for (int c = 0; c < n; ++c) X[c][i] = x[c];
  }

  AlmostPeriodScan out;
  out.epsilon = epsilon;
  std::vector<double> acc(samples), shifted;
  for (double tau : tau_grid) {
    const double k = std::round(tau / h);
    std::size_t count;
    std::fill(acc.begin(), acc.end(), 0.0);
    if (std::abs(k * h - tau) <= 1e-9 * (1.0 + tau)) {
      const auto shift = static_cast<std::size_t>(k);
      count = samples - shift;
      for (int c = 0; c < n; ++c)
        kernels::accumulate_sq_diff(X[c].data() + shift, X[c].data(), acc.data(), count);
    } else {
      count = static_cast<std::size_t>(std::floor((span - tau) / h)) + 1;
      std::vector<Vec> xs(count);
      for (std::size_t i = 0; i < count; ++i)
        xs[i] = traj.evaluate(std::min(t1, t0 + h * static_cast<double>(i) + tau));
      shifted.resize(count);
      for (int c = 0; c < n; ++c) {
        for (std::size_t i = 0; i < count; ++i) shifted[i] = xs[i][c];
        kernels::accumulate_sq_diff(shifted.data(), X[c].data(), acc.data(), count);
      }
    }
    const double defect = std::sqrt(kernels::max_value(acc.data(), count));
    out.tau.push_back(tau);
    out.defect.push_back(defect);
    if (defect <= epsilon) out.accepted.push_back(tau);
  }

  std::sort(out.accepted.begin(), out.accepted.end());
  if (!out.accepted.empty()) {
    double gap = std::max(out.accepted.front() - tau_min, tau_max - out.accepted.back());
    for (std::size_t i = 1; i < out.accepted.size(); ++i)
      gap = std::max(gap, out.accepted[i] - out.accepted[i - 1]);
    out.max_gap = gap;
  }
  return out;
}

double lagrangian_sup(const LagrangianSystem& L, const Trajectory& traj, std::size_t grid) {
  const int m = L.m;
  double sup = 0.0;
  const double t0 = traj.t_begin(), t1 = traj.t_end();
  for (std::size_t i = 0; i < grid; ++i) {
    const double t = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(grid - 1);
    const Vec x = traj.evaluate(t);
    sup = std::max(sup, std::abs(L.lagrangian(t, x.head(m), x.tail(m))));
  }
  return sup;
}

}  // namespace vw
