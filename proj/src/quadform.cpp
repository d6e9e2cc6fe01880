#include "vw/quadform.hpp"

#include "vw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace vw {

namespace {

// Natural cubic spline through (x_i, y_i).
class CubicSpline {
 public:
  CubicSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    m_.assign(n, 0.0);
    if (n < 3) return;
    std::vector<double> a(n, 0.0), b(n, 1.0), c(n, 0.0), r(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      const double h0 = x_[i] - x_[i - 1], h1 = x_[i + 1] - x_[i];
      a[i] = h0;
      b[i] = 2.0 * (h0 + h1);
      c[i] = h1;
      r[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
    }
    for (std::size_t i = 1; i < n; ++i) {
      const double w = a[i] / b[i - 1];
      b[i] -= w * c[i - 1];
      r[i] -= w * r[i - 1];
    }
    m_[n - 1] = r[n - 1] / b[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) m_[i] = (r[i] - c[i] * m_[i + 1]) / b[i];
  }

  double value(double t, double* deriv) const {
    const std::size_t i = segment(t);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    const double v = A * y_[i] + B * y_[i + 1] +
                     ((A * A * A - A) * m_[i] + (B * B * B - B) * m_[i + 1]) * h * h / 6.0;
    if (deriv)
      *deriv = (y_[i + 1] - y_[i]) / h +
               (-(3 * A * A - 1) * m_[i] + (3 * B * B - 1) * m_[i + 1]) * h / 6.0;
    return v;
  }

 private:
  std::size_t segment(double t) const {
    const double slack = 1e-12 * (1.0 + std::abs(t));
    if (t < x_.front() - slack || t > x_.back() + slack)
      throw Error(ErrorCode::OutOfSpan, "time outside the tabulated form");
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    return std::min(std::max<std::size_t>(i, 1), x_.size() - 1) - 1;
  }

  std::vector<double> x_, y_, m_;
};

double sym_quad(const Mat& S, const Vec& x) { return x.dot(S * x); }

}  // namespace

Mat SymmetricFormPath::derivative(double t) const {
  if (S_dot) return S_dot(t);
  const double h = 1e-5 * (1.0 + std::abs(t));
  return (S(t + h) - S(t - h)) / (2.0 * h);
}

SymmetricFormPath SymmetricFormPath::constant(const Mat& S0) {
  SymmetricFormPath p;
  p.n = static_cast<int>(S0.rows());
  p.S = [S0](double) { return S0; };
  p.S_dot = [S0](double) { return Mat::Zero(S0.rows(), S0.cols()); };
  return p;
}

SymmetricFormPath SymmetricFormPath::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open form table " + path);
  std::vector<double> ts;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t cols = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw Error(ErrorCode::ConfigError, "non-numeric row in form table " + path);
    }
    if (cols == 0) cols = vals.size();
    if (vals.size() != cols) throw Error(ErrorCode::ConfigError, "ragged form table " + path);
    rows.push_back(std::move(vals));
  }
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cols) - 1.0)));
  if (rows.size() < 2 || n < 1 || static_cast<std::size_t>(n * n + 1) != cols)
    throw Error(ErrorCode::ConfigError, "form table needs >= 2 rows of t and n*n entries");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r > 0 && !(rows[r][0] > rows[r - 1][0]))
      throw Error(ErrorCode::ConfigError, "form table times must increase");
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (std::abs(rows[r][1 + i * n + j] - rows[r][1 + j * n + i]) > 1e-12)
          throw Error(ErrorCode::ConfigError, "form table row is not symmetric");
    ts.push_back(rows[r][0]);
  }
  auto splines = std::make_shared<std::vector<CubicSpline>>();
  for (int e = 0; e < n * n; ++e) {
    std::vector<double> y;
    for (const auto& r : rows) y.push_back(r[1 + e]);
    splines->emplace_back(ts, std::move(y));
  }
  SymmetricFormPath p;
  p.n = n;
  p.S = [splines, n](double t) {
    Mat S(n, n);
    for (int e = 0; e < n * n; ++e) S(e / n, e % n) = (*splines)[e].value(t, nullptr);
    return Mat(0.5 * (S + S.transpose()));
  };
  p.S_dot = [splines, n](double t) {
    Mat S(n, n);
    for (int e = 0; e < n * n; ++e) {
      double d = 0.0;
      (*splines)[e].value(t, &d);
      S(e / n, e % n) = d;
    }
    return Mat(0.5 * (S + S.transpose()));
  };
  return p;
}

SpectralSplit spectral_split(const Mat& S) {
  if (S.rows() != S.cols() || S.rows() == 0) throw std::invalid_argument("spectral_split: square");
  if ((S - S.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + S.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("spectral_split: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(S);
  SpectralSplit sp;
  sp.eigenvalues = es.eigenvalues();
  sp.eigenvectors = es.eigenvectors();
  const double big = sp.eigenvalues.cwiseAbs().maxCoeff();
  const double small = sp.eigenvalues.cwiseAbs().minCoeff();
  if (!(big > 0.0) || small < 1e-10 * big)
    throw Error(ErrorCode::NearSingular, "form is numerically singular");
  const Eigen::Index n = S.rows();
  sp.P_plus = Mat::Zero(n, n);
  sp.P_minus = Mat::Zero(n, n);
  std::vector<Eigen::Index> plus;
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec v = sp.eigenvectors.col(i);
    if (sp.eigenvalues[i] > 0) {
      sp.P_plus += v * v.transpose();
      plus.push_back(i);
    } else {
      sp.P_minus += v * v.transpose();
    }
  }
  sp.n_plus = static_cast<int>(plus.size());
  sp.n_minus = static_cast<int>(n) - sp.n_plus;
  sp.indefinite = sp.n_plus > 0 && sp.n_minus > 0;
  sp.basis_plus.resize(n, sp.n_plus);
  sp.lambda_plus.resize(sp.n_plus);
  for (int j = 0; j < sp.n_plus; ++j) {
    sp.basis_plus.col(j) = sp.eigenvectors.col(plus[j]);
    sp.lambda_plus[j] = sp.eigenvalues[plus[j]];
  }
  return sp;
}

SpectralSplit spectral_split(const SymmetricFormPath& S, double t) { return spectral_split(S(t)); }

Vec fixed_time_retraction(const SymmetricFormPath& Sp, double t, double w, const Vec& x) {
  if (!(w > 0.0)) throw std::invalid_argument("fixed_time_retraction: w must be positive");
  const Mat S = Sp(t);
  const double q = sym_quad(S, x);
  if (std::abs(q - w) > 1e-8 * std::max(1.0, std::abs(w)))
    throw Error(ErrorCode::NotOnLevelSet, "point is not on the level set <Sx,x> = w", t, x);
  const SpectralSplit sp = spectral_split(S);
  const Vec xp = sp.P_plus * x;
  const double qp = sym_quad(S, xp);
  if (!(qp > 0.0))
    throw Error(ErrorCode::NonPositiveSPlus, "positive part of the form vanishes at x", t, x);
  return std::sqrt(w / qp) * xp;
}

ConditionReport dichotomy_form_check(const std::function<Mat(double)>& A,
                                     const SymmetricFormPath& C, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("dichotomy_form_check: empty grid");
  ConditionReport rep;
  rep.condition = "dichotomy_form";
  double worst = kInf;
  for (double t : grid) {
    const Mat Ct = C(t), At = A(t);
    const Mat Q = Ct * At + At.transpose() * Ct + C.derivative(t);
    const double e = min_eig(0.5 * (Q + Q.transpose()));
    ++rep.samples;
    if (e < worst) {
      worst = e;
      rep.witness_t = t;
    }
  }
  rep.worst_value = 1.0 - worst;
  rep.constants["min_eig"] = worst;
  rep.status = worst >= 1.0 - 1e-9 ? Status::Pass : Status::Fail;
  if (rep.status == Status::Fail) {
    const Mat Ct = C(*rep.witness_t), At = A(*rep.witness_t);
    const Mat Q = Ct * At + At.transpose() * Ct + C.derivative(*rep.witness_t);
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Q + Q.transpose()));
    rep.witness_x = es.eigenvectors().col(0);
  }
  return rep;
}

namespace {

void check_Fconst(double c, double d, double m) {
  if (!(d > 0.0)) throw Error(ErrorCode::InvalidConstants, "d = 1/2 - c(k+l) must be positive");
  if (!(m > 0.0) || !(c > 0.0))
    throw Error(ErrorCode::InvalidConstants, "c and m must be positive");
}

}  // namespace

double F_of_r(double r, double c, double d, double m) {
  check_Fconst(c, d, m);
  if (r < 0.0) throw std::invalid_argument("F_of_r: r must be nonnegative");
  r = std::max(r, c / d);
  return d / m * r * r + 2.0 * (c / m + d / (m * m)) * (std::log1p(m * r) / m - r);
}

double F_prime(double r, double c, double d, double m) {
  check_Fconst(c, d, m);
  if (r < c / d) return 0.0;
  return 2.0 * (d * r * r - c * r) / (m * r + 1.0);
}

double r_quad(double c, double d, double m, double spread) {
  check_Fconst(c, d, m);
  const double A = d / m, B = -2.0 * (c / m + d / (m * m));
  const double C0 = -F_of_r(c / d, c, d, m) - c * c / (2.0 * d * d) * spread;
  return (-B + std::sqrt(B * B - 4.0 * A * C0)) / (2.0 * A);
}

double r_star(double c, double d, double m, double spread) {
  check_Fconst(c, d, m);
  if (spread < 0.0) throw Error(ErrorCode::InvalidConstants, "spread must be nonnegative");
  const double r0 = c / d;
  if (spread == 0.0) return r0;
  const double target = F_of_r(r0, c, d, m) + c * c / (2.0 * d * d) * spread;
  const double rq = r_quad(c, d, m, spread);
  return brent_root([&](double r) { return F_of_r(r, c, d, m) - target; }, r0, rq, 1e-15, 1e-14);
}

InitialSetFamily form_ball_family(const SymmetricFormPath& S, double w_upper,
                                  std::function<double(double)> phi) {
  return [S, w_upper, phi](double t) {
    const SpectralSplit sp = spectral_split(S, t);
    if (sp.n_plus == 0)
      throw Error(ErrorCode::NonPositiveSPlus, "form has no positive subspace");
    InitialSet init;
    init.p = sp.n_plus;
    init.t = t;
    const double ph = phi ? phi(t) : 1.0;
    Mat cols = sp.basis_plus;
    for (int j = 0; j < sp.n_plus; ++j) cols.col(j) *= std::sqrt(w_upper / sp.lambda_plus[j]) * ph;
    init.map = [cols](const Vec& u) {
      Vec z = 2.0 * u.array() - 1.0;
      if (z.size() > 1) {
        const double e = z.norm();
        if (e > 0.0) z *= z.cwiseAbs().maxCoeff() / e;
      }
      return Vec(cols * z);
    };
    return init;
  };
}

VectorField QuasilinearSystem::field() const {
  VectorField f;
  f.dim = n;
  auto Af = A;
  auto gf = g;
  f.f = [Af, gf](double t, const Vec& x) { return Vec(Af(t) * x + gf(t, x)); };
  return f;
}

namespace {

double phi_or_one(const std::function<double(double)>& phi, double t) {
  return phi ? phi(t) : 1.0;
}

double phi_dot_or_fd(const std::function<double(double)>& phi,
                     const std::function<double(double)>& phi_dot, double t) {
  if (phi_dot) return phi_dot(t);
  if (!phi) return 0.0;
  const double h = fd_step(t);
  return (phi(t + h) - phi(t - h)) / (2.0 * h);
}

// Sampled sup of V - c^* W over M_t.
double sample_nu(const VWPair& pair, const InitialSet& init) {
  double nu = -kInf;
  const int count = init.p == 1 ? 201 : 512;
  Halton h(init.p, 11);
  for (int i = 0; i < count; ++i) {
    Vec u = init.p == 1 ? Vec::Constant(1, static_cast<double>(i) / (count - 1)) : h.next();
    const Vec x = init.map(u);
    nu = std::max(nu, pair.V(init.t, x) - pair.c_upper * pair.W(init.t, x));
  }
  return nu;
}

std::pair<double, double> margins(double lo, double hi) {
  const double span = hi - lo;
  const double dl = lo != 0.0 ? 0.01 * std::abs(lo) : 0.01 * span;
  const double dh = hi != 0.0 ? 0.01 * std::abs(hi) : 0.01 * span;
  return {lo - dl, hi + dh};
}

}  // namespace

QuasilinearVW build_quasilinear_vw(const QuasilinearSystem& sys, const SymmetricFormPath& C,
                                   double r0, const std::vector<double>& window_grid) {
  const double c = sys.c, d = sys.d(), m = sys.m();
  check_Fconst(c, d, m);
  if (!(r0 > c / d)) throw Error(ErrorCode::InvalidConstants, "r0 must exceed c/d");
  if (window_grid.empty()) throw std::invalid_argument("build_quasilinear_vw: empty grid");

  QuasilinearVW out;
  out.r0 = r0;
  out.alpha_lower = 2.0 * (d * r0 * r0 - c * r0);
  out.lambda_minus_inf = kInf;
  out.lambda_plus_sup = -kInf;
  for (double t : window_grid) {
    Eigen::SelfAdjointEigenSolver<Mat> es(C(t));
    out.lambda_minus_inf = std::min(out.lambda_minus_inf, es.eigenvalues()[0]);
    out.lambda_plus_sup = std::max(out.lambda_plus_sup, es.eigenvalues()[es.eigenvalues().size() - 1]);
  }
  out.omega0 = r0 * r0 * out.lambda_minus_inf;
  out.omega_sup = r0 * r0 * out.lambda_plus_sup;

  auto phi = sys.phi;
  auto phi_dot = sys.phi_dot;
  const double Fr0 = F_of_r(r0, c, d, m);
  VWPair& p = out.pair;
  p.V.value = [=](double t, const Vec& x) {
    return F_of_r(x.norm() / phi_or_one(phi, t), c, d, m) - Fr0;
  };
  p.V.grad = [=](double t, const Vec& x) -> Vec {
    const double nx = x.norm(), ph = phi_or_one(phi, t);
    if (nx == 0.0) return Vec::Zero(x.size());
    return F_prime(nx / ph, c, d, m) / (nx * ph) * x;
  };
  p.V.dt = [=](double t, const Vec& x) {
    const double nx = x.norm(), ph = phi_or_one(phi, t);
    return -F_prime(nx / ph, c, d, m) * nx * phi_dot_or_fd(phi, phi_dot, t) / (ph * ph);
  };
  p.W.value = [=](double t, const Vec& x) {
    const double ph = phi_or_one(phi, t);
    return sym_quad(C(t), x) / (ph * ph);
  };
  p.W.grad = [=](double t, const Vec& x) -> Vec {
    const double ph = phi_or_one(phi, t);
    return 2.0 * C(t) * x / (ph * ph);
  };
  p.W.dt = [=](double t, const Vec& x) {
    const double ph = phi_or_one(phi, t);
    return sym_quad(C.derivative(t), x) / (ph * ph) -
           2.0 * phi_dot_or_fd(phi, phi_dot, t) / (ph * ph * ph) * sym_quad(C(t), x);
  };
  p.c_lower = 1.0;
  p.c_upper = 1.0;
  std::tie(p.w_lower, p.w_upper) = margins(out.omega0, out.omega_sup);
  out.family = form_ball_family(C, p.w_upper, phi);
  out.nu = sample_nu(p, out.family(window_grid.front()));
  p.V_cap = p.c_upper * p.w_upper + std::max(out.nu, -p.c_upper * p.w_lower);
  return out;
}

QuasilinearSystem make_bvp_system(const BvpInputs& in) {
  if (!in.rho || !in.omega || !in.Z || in.grid.empty())
    throw std::invalid_argument("build_bvp_system: rho, omega, Z and a grid are required");
  double rho_inf = kInf, rho_sup = 0.0, om_inf = kInf, a = 0.0, l = 0.0;
  for (double t : in.grid) {
    const double r = in.rho(t), o = in.omega(t);
    if (!(r > 0.0) || !(o > 0.0))
      throw Error(ErrorCode::HypothesisViolated, "rho and omega must be positive");
    rho_inf = std::min(rho_inf, r);
    rho_sup = std::max(rho_sup, r);
    om_inf = std::min(om_inf, o);
    a = std::max(a, std::max(r, o));  // spectral norm of the antidiagonal matrix
    if (in.phi) l = std::max(l, std::abs(phi_dot_or_fd(in.phi, in.phi_dot, t) / in.phi(t)));
  }
  QuasilinearSystem s;
  s.n = 2;
  auto rho = in.rho;
  auto omega = in.omega;
  auto Z = in.Z;
  s.A = [rho, omega](double t) {
    Mat A(2, 2);
    A << 0.0, rho(t), omega(t), 0.0;
    return A;
  };
  s.g = [rho, Z](double t, const Vec& x) {
    Vec g(2);
    g << 0.0, Z(t, x[0], rho(t) * x[1]);
    return g;
  };
  s.phi = in.phi;
  s.phi_dot = in.phi_dot;
  s.delta = std::min(rho_inf, om_inf);
  s.a = a;
  s.k = in.ell * std::max(1.0, rho_sup);
  s.l = l;
  s.c = 1.0 / (2.0 * s.delta);
  s.sigma = s.c * s.c;
  Mat C(2, 2);
  C << 0.0, s.c, s.c, 0.0;
  s.C = SymmetricFormPath::constant(C);
  return s;
}

QuasilinearSystem build_bvp_system(const BvpInputs& in) {
  QuasilinearSystem s = make_bvp_system(in);
  if (!(s.k + s.l < s.delta)) {
    std::ostringstream os;
    os << "k + l = " << s.k + s.l << " is not below delta = " << s.delta;
    throw Error(ErrorCode::HypothesisViolated, os.str());
  }
  return s;
}

ConditionReport check_quasilinear_hypotheses(const QuasilinearSystem& sys,
                                             const HypothesisOptions& opt) {
  ConditionReport rep;
  rep.condition = "quasilinear_hypotheses";
  const double c = sys.c, k = sys.k, l = sys.l, d = sys.d();
  rep.constants["a"] = sys.a;
  rep.constants["c"] = c;
  rep.constants["k"] = k;
  rep.constants["l"] = l;
  rep.constants["d"] = d;
  rep.constants["m"] = sys.m();
  rep.constants["c_k_plus_l"] = c * (k + l);
  rep.worst_value = -kInf;
  bool fail = false;
  auto note_fail = [&](const std::string& what, double value, double t, const Vec& x) {
    if (!fail || value > rep.worst_value) {
      rep.worst_value = value;
      rep.witness_t = t;
      rep.witness_x = x;
    }
    fail = true;
    rep.notes.push_back(what);
  };

  const std::vector<double> ts =
      opt.grid.empty() ? std::vector<double>{0.0} : opt.grid;
  // The a priori lower estimate 2 d r^2 - 2 c r of W' along f must become
  // positive for large r = ||x||/phi; the worst sampled point is the witness.
  double worst_est = kInf;
  double wt = ts.front();
  Vec wx;
  std::size_t n_samples = 0;
  double growth_worst = -kInf, lip_worst = -kInf;
  double gt = 0.0, lt = 0.0;
  Vec gx, lx;
  for (double t : ts) {
    const auto pts = opt.sampler.box ? opt.sampler.samples(t) : std::vector<Vec>{};
    const double ph = phi_or_one(sys.phi, t);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Vec& x = pts[i];
      ++n_samples;
      const double r = x.norm() / ph;
      const double est = 2.0 * d * r * r - 2.0 * c * r;
      if (r > 0.0 && est / (r * r) < worst_est) {
        worst_est = est / (r * r);
        wt = t;
        wx = x;
      }
      const double gv = sys.g(t, x).norm() - (k * x.norm() + ph);
      if (gv > growth_worst) {
        growth_worst = gv;
        gt = t;
        gx = x;
      }
      if (opt.check_lipschitz && i > 0) {
        const Vec& y = pts[i - 1];
        const double lv = (sys.g(t, x) - sys.g(t, y)).norm() - k * (x - y).norm();
        if (lv > lip_worst) {
          lip_worst = lv;
          lt = t;
          lx = x;
        }
      }
    }
  }
  rep.samples = n_samples;
  if (!(c * (k + l) < 0.5)) {
    std::ostringstream os;
    os << "c(k+l) = " << c * (k + l) << " is not below 1/2";
    note_fail(os.str(), c * (k + l) - 0.5, wt, wx.size() ? wx : Vec::Zero(sys.n));
  }
  if (n_samples > 0) {
    rep.constants["growth_excess"] = growth_worst;
    if (growth_worst > 1e-12 * (1.0 + std::abs(k)))
      note_fail("||g(t,x)|| exceeds k||x|| + phi(t)", growth_worst, gt, gx);
    if (opt.check_lipschitz && lip_worst > -kInf) {
      rep.constants["lipschitz_excess"] = lip_worst;
      if (lip_worst > 1e-12 * (1.0 + std::abs(k)))
        note_fail("g is not k-Lipschitz on samples", lip_worst, lt, lx);
    }
  }
  if (!opt.grid.empty()) {
    const ConditionReport dc = dichotomy_form_check(sys.A, sys.C, opt.grid);
    rep.constants["dichotomy_min_eig"] = dc.constants.at("min_eig");
    if (dc.status == Status::Fail)
      note_fail("dichotomy form inequality fails", dc.worst_value, *dc.witness_t, dc.witness_x);
  }
  if (fail) {
    rep.status = Status::Fail;
  } else {
    rep.status = Status::Pass;
    rep.worst_value = c * (k + l) - 0.5;
  }
  return rep;
}

UniquenessProblem quasilinear_uniqueness(const QuasilinearSystem& sys, double r) {
  UniquenessProblem u;
  const SymmetricFormPath C = sys.C;
  auto phi = sys.phi;
  auto phi_dot = sys.phi_dot;
  u.U.value = [=](double t, const Vec& x, const Vec& y) {
    const double ph = phi_or_one(phi, t);
    return sym_quad(C(t), x - y) / (ph * ph);
  };
  u.U.grad_x = [=](double t, const Vec& x, const Vec& y) -> Vec {
    const double ph = phi_or_one(phi, t);
    return 2.0 * C(t) * (x - y) / (ph * ph);
  };
  u.U.grad_y = [=](double t, const Vec& x, const Vec& y) -> Vec {
    const double ph = phi_or_one(phi, t);
    return -2.0 * C(t) * (x - y) / (ph * ph);
  };
  u.U.dt = [=](double t, const Vec& x, const Vec& y) {
    const double ph = phi_or_one(phi, t);
    const Vec z = x - y;
    return sym_quad(C.derivative(t), z) / (ph * ph) -
           2.0 * phi_dot_or_fd(phi, phi_dot, t) / (ph * ph * ph) * sym_quad(C(t), z);
  };
  u.V.value = [=](double t, const Vec& x) {
    const double ph = phi_or_one(phi, t);
    return x.squaredNorm() / (ph * ph);
  };
  u.eta = [](double s) { return s; };
  const double beta = (1.0 - 2.0 * (sys.k + sys.l)) / sys.c;
  u.beta = [beta](double, double) { return beta; };
  const double c = sys.c;
  u.b = [c](double, double rr) { return 4.0 * c * rr; };
  u.r = r;
  return u;
}

Vec generalized_eigenvalues(const Mat& S, const Mat& B) {
  Eigen::LLT<Mat> llt(B);
  if (llt.info() != Eigen::Success || !(min_eig(B) > 0.0))
    throw Error(ErrorCode::BNotPositiveDefinite, "B is not positive definite");
  const Mat L = llt.matrixL();
  const Mat Linv = L.inverse();
  Mat K = Linv * S * Linv.transpose();
  K = 0.5 * (K + K.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(K, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

PencilSlice pencil_charvals(const SymmetricFormPath& S, const SymmetricFormPath& B, double t) {
  const Mat St = S(t), Bt = B(t);
  PencilSlice ps;
  const Vec lam = generalized_eigenvalues(St, Bt);
  ps.lambda_minus = lam[0];
  ps.lambda_plus = lam[lam.size() - 1];
  const SpectralSplit sp = spectral_split(St);
  if (sp.n_plus > 0) {
    const Mat& E = sp.basis_plus;
    const Vec lr = generalized_eigenvalues(E.transpose() * St * E, E.transpose() * Bt * E);
    ps.lambda_minus_plus = lr[0];
  } else {
    ps.lambda_minus_plus = std::numeric_limits<double>::quiet_NaN();
  }
  const Vec mb = generalized_eigenvalues(B.derivative(t), Bt);
  ps.M = std::max(std::abs(mb[0]), std::abs(mb[mb.size() - 1]));
  ps.mu_minus = generalized_eigenvalues(S.derivative(t), Bt)[0];
  return ps;
}

PencilBound pencil_bound(const PencilData& pd, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("pencil_bound: empty grid");
  if (!pd.gamma || !pd.Gamma || !pd.Delta)
    throw std::invalid_argument("pencil_bound: gamma, Gamma and Delta are required");
  PencilBound out;
  out.grid = grid;
  double lp_sup = -kInf, lm_inf = kInf, xi = kInf, vs = -kInf;
  for (double t : grid) {
    const PencilSlice ps = pencil_charvals(pd.S, pd.B, t);
    out.slices.push_back(ps);
    lp_sup = std::max(lp_sup, ps.lambda_plus);
    lm_inf = std::min(lm_inf, ps.lambda_minus);
    const double g = pd.gamma(t);
    if (!(g > 0.0)) throw Error(ErrorCode::ConditionGViolated, "gamma must be positive");
    xi = std::min(xi, ps.mu_minus / g);
    vs = std::max(vs, ps.M / g);
  }
  out.xi = std::isnan(pd.xi) ? xi : pd.xi;
  out.varsigma = std::isnan(pd.varsigma) ? vs : pd.varsigma;
  out.spread = lp_sup - lm_inf;
  const double v0 = pd.v0;
  const double xi_ = out.xi, vs_ = out.varsigma;
  auto Gamma = pd.Gamma;
  auto Delta = pd.Delta;

  // Condition (g).
  if (!(v0 > 0.0)) throw Error(ErrorCode::ConditionGViolated, "v0 must be positive");
  const double g0 = 2.0 * Gamma(v0) + xi_ * v0;
  if (!(g0 > 0.0)) {
    std::ostringstream os;
    os << "2 Gamma(v0) + xi v0 = " << g0 << " is not positive";
    throw Error(ErrorCode::ConditionGViolated, os.str());
  }
  for (int i = 1; i <= 400; ++i) {
    const double v = v0 * std::pow(pd.divergence_cap, i / 400.0);
    const double slope = (Gamma(v) - Gamma(v0)) / (v - v0);
    if (slope < -xi_ / 2.0 - 1e-12 * (1.0 + std::abs(xi_))) {
      std::ostringstream os;
      os << "slope of Gamma from v0 falls below -xi/2 at v = " << v;
      throw Error(ErrorCode::ConditionGViolated, os.str());
    }
  }
  auto integrand = [=](double u) { return (2.0 * Gamma(u) + xi_ * u) / (2.0 * Delta(u) + vs_ * u); };
  auto F = [=](double v) {
    if (v <= v0) return integrand(v0) * (v - v0);
    return integrate_gk(integrand, v0, v, 1e-13, 1e-12);
  };
  out.F = F;
  const double target = 0.5 * v0 * out.spread;
  if (target <= 0.0) {
    out.v_star = v0;
  } else {
    double b = 2.0 * v0;
    auto g = [&](double v) { return F(v) - target; };
    if (!bracket_right(g, v0, b, v0 * pd.divergence_cap))
      throw Error(ErrorCode::ConditionGViolated,
                  "integral of (2 Gamma + xi v)/(2 Delta + varsigma v) does not reach its target");
    out.v_star = brent_root(g, v0, b, 1e-14, 1e-13);
  }

  out.omega0 = lm_inf * v0;
  out.omega_sup = lp_sup * v0;
  SymmetricFormPath S = pd.S, B = pd.B;
  VWPair& p = out.pair;
  const double F0 = integrand(v0);
  p.V.value = [=](double t, const Vec& x) { return F(sym_quad(B(t), x)); };
  p.V.grad = [=](double t, const Vec& x) -> Vec {
    const Mat Bt = B(t);
    const double v = sym_quad(Bt, x);
    return (v <= v0 ? F0 : integrand(v)) * 2.0 * Bt * x;
  };
  p.V.dt = [=](double t, const Vec& x) {
    const double v = sym_quad(B(t), x);
    return (v <= v0 ? F0 : integrand(v)) * sym_quad(B.derivative(t), x);
  };
  p.W.value = [=](double t, const Vec& x) { return sym_quad(S(t), x); };
  p.W.grad = [=](double t, const Vec& x) -> Vec { return 2.0 * S(t) * x; };
  p.W.dt = [=](double t, const Vec& x) { return sym_quad(S.derivative(t), x); };
  p.c_lower = 1.0;
  p.c_upper = 1.0;
  std::tie(p.w_lower, p.w_upper) = margins(out.omega0, out.omega_sup);
  out.family = form_ball_family(S, p.w_upper);
  const double nu = sample_nu(p, out.family(grid.front()));
  p.V_cap = p.c_upper * p.w_upper + std::max(nu, -p.c_upper * p.w_lower);
  auto gamma = pd.gamma;
  out.alpha_lower = [gamma, g0](double t) { return gamma(t) * g0; };
  return out;
}

}  // namespace vw
