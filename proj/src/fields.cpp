#include "vw/fields.hpp"

#include "vw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vw {

const char* to_string(Status s) {
  switch (s) {
    case Status::Pass: return "pass";
    case Status::Fail: return "fail";
    case Status::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

bool Domain::contains(double t, const Vec& x) const {
  if (lo.size() == x.size()) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] < lo[i]) return false;
  }
  if (hi.size() == x.size()) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
      if (x[i] > hi[i]) return false;
  }
  return !predicate || predicate(t, x);
}

bool Domain::bounded() const {
  return lo.size() > 0 && lo.size() == hi.size() && lo.allFinite() && hi.allFinite();
}

void VWPair::validate() const {
  if (!V.value || !W.value) throw std::invalid_argument("VWPair: V and W must be set");
  if (!(w_lower < w_upper)) throw std::invalid_argument("VWPair: w_lower must be below w_upper");
  if (!(c_upper > 0.0)) throw std::invalid_argument("VWPair: c_upper must be positive");
  if (!(c_lower >= 0.0)) throw std::invalid_argument("VWPair: c_lower must be nonnegative");
}

bool VWPair::in_window(double t, const Vec& x) const {
  const double w = W(t, x);
  return w > w_lower && w < w_upper;
}

RegionSampler RegionSampler::fixed_box(Vec lo, Vec hi, std::size_t count, std::uint64_t seed,
                                       SamplingStrategy strategy) {
  RegionSampler s;
  s.strategy = strategy;
  s.count = count;
  s.seed = seed;
  s.box = [lo = std::move(lo), hi = std::move(hi)](double) { return std::make_pair(lo, hi); };
  return s;
}

std::vector<Vec> RegionSampler::samples(double t) const {
  if (!box) throw std::invalid_argument("RegionSampler: no bounding box");
  const auto [lo, hi] = box(t);
  const int n = static_cast<int>(lo.size());
  if (n == 0 || hi.size() != lo.size() || !lo.allFinite() || !hi.allFinite())
    throw std::invalid_argument("RegionSampler: bounding box must be finite and nonempty");
  std::vector<Vec> out;
  if (strategy == SamplingStrategy::Grid) {
    int g = static_cast<int>(std::floor(std::pow(static_cast<double>(count), 1.0 / n) + 1e-9));
    g = std::max(g, 2);
    std::vector<int> idx(n, 0);
    while (true) {
      Vec x(n);
      for (int i = 0; i < n; ++i) x[i] = lo[i] + (hi[i] - lo[i]) * idx[i] / (g - 1);
      out.push_back(std::move(x));
      int k = 0;
      while (k < n && ++idx[k] == g) idx[k++] = 0;
      if (k == n) break;
    }
  } else {
    Halton h(n, seed);
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      const Vec u = h.next();
      out.push_back(lo + (hi - lo).cwiseProduct(u));
    }
  }
  return out;
}

std::vector<double> RegionSampler::times(double t0, double t1) const {
  if (time_slices <= 1 || t0 == t1) return {t0};
  std::vector<double> ts(time_slices);
  for (std::size_t i = 0; i < time_slices; ++i)
    ts[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(time_slices - 1);
  return ts;
}

namespace {

void record_worst(ConditionReport& rep, double value, double t, const Vec& x) {
  if (!rep.witness_t || value > rep.worst_value) {
    rep.worst_value = value;
    rep.witness_t = t;
    rep.witness_x = x;
  }
}

}  // namespace

ConditionReport check_condition_A(const VWPair& pair, const VectorField& field,
                                  const RegionSampler& sampler, double t0, double t1) {
  pair.validate();
  ConditionReport rep;
  rep.condition = "condition_A";
  double ratio_upper = -kInf, ratio_lower = -kInf, wdot_min = kInf;
  bool failed = false;
  for (double t : sampler.times(t0, t1)) {
    for (const Vec& x : sampler.samples(t)) {
      if (!pair.omega.contains(t, x)) continue;
      const double v = pair.V(t, x);
      if (v < 0.0 || !pair.in_window(t, x)) continue;
      ++rep.samples;
      const double wd = lie_derivative(pair.W, field, t, x);
      const double vd = lie_derivative(pair.V, field, t, x);
      const double tol = 1e-9 * (1.0 + std::abs(vd) + std::abs(wd));
      double worst = -wd;
      worst = std::max(worst, vd - pair.c_upper * wd);
      if (std::isfinite(pair.c_lower)) worst = std::max(worst, -pair.c_lower * wd - vd);
      record_worst(rep, worst, t, x);
      if (wd <= 0.0 || worst > tol) failed = true;
      wdot_min = std::min(wdot_min, wd);
      if (wd > 0.0) {
        ratio_upper = std::max(ratio_upper, vd / wd);
        ratio_lower = std::max(ratio_lower, -vd / wd);
      }
    }
  }
  if (rep.samples == 0)
    throw Error(ErrorCode::EmptyRegion, "no sample with V >= 0 inside the W-window");
  rep.status = failed ? Status::Fail : Status::Pass;
  rep.constants["c_upper_measured"] = ratio_upper;
  rep.constants["c_lower_measured"] = ratio_lower;
  rep.constants["wdot_min"] = wdot_min;
  rep.notes.push_back("sampled certificate");
  return rep;
}

double estimate_alpha(const VWPair& pair, const VectorField& field, const RegionSampler& sampler,
                      double t) {
  double best = kInf;
  bool any = false;
  for (const Vec& x : sampler.samples(t)) {
    if (!pair.omega.contains(t, x)) continue;
    if (!(pair.V(t, x) > 0.0) || !pair.in_window(t, x)) continue;
    any = true;
    best = std::min(best, lie_derivative(pair.W, field, t, x));
  }
  if (!any) throw Error(ErrorCode::EmptyRegion, "no sample with V > 0 inside the W-window");
  return best;
}

namespace {

// Newton steps along grad V onto V = 0.
bool project_to_level(const ScalarField& V, double t, Vec& x, double v_tol) {
  for (int it = 0; it < 100; ++it) {
    const double v = V(t, x);
    if (std::abs(v) <= v_tol) return true;
    const Vec g = V.gradient(t, x);
    const double gg = g.squaredNorm();
    if (!(gg > 0.0) || !std::isfinite(gg)) return false;
    x -= (v / gg) * g;
  }
  return std::abs(V(t, x)) <= v_tol;
}

struct Candidate {
  double w;
  Vec x;
};

bool better(const Candidate& a, const Candidate& b, double sign) {
  const double fa = sign * a.w, fb = sign * b.w;
  if (fa != fb) return fa < fb;
  return std::lexicographical_compare(a.x.data(), a.x.data() + a.x.size(), b.x.data(),
                                      b.x.data() + b.x.size());
}

// Augmented Lagrangian for min sign*W subject to V = 0.
std::optional<Candidate> level_search(const VWPair& pair, double t, const Vec& start, double sign,
                                      double v_tol) {
  Vec x = start;
  double mu = 0.0, lambda = 10.0, v_prev = kInf;
  for (int outer = 0; outer < 40; ++outer) {
    auto phi = [&](const Vec& y) {
      const double v = pair.V(t, y);
      return sign * pair.W(t, y) + mu * v + 0.5 * lambda * v * v;
    };
    auto grad = [&](const Vec& y) -> Vec {
      const double v = pair.V(t, y);
      return sign * pair.W.gradient(t, y) + (mu + lambda * v) * pair.V.gradient(t, y);
    };
    BfgsOptions bo;
    bo.max_iter = 300;
    const OptimizeResult r = bfgs(phi, grad, x, bo);
    if (!r.x.allFinite()) return std::nullopt;
    x = r.x;
    const double v = pair.V(t, x);
    if (!std::isfinite(v)) return std::nullopt;
    if (std::abs(v) <= v_tol) break;
    mu += lambda * v;
    if (std::abs(v) > 0.25 * std::abs(v_prev)) lambda = std::min(lambda * 10.0, 1e12);
    v_prev = v;
  }
  if (!project_to_level(pair.V, t, x, v_tol)) return std::nullopt;
  const double w = pair.W(t, x);
  if (!std::isfinite(w)) return std::nullopt;
  return Candidate{w, x};
}

// Quadratic penalty for min sign*W subject to V <= 0.
std::optional<Candidate> sublevel_search(const VWPair& pair, double t, const Vec& start,
                                         double sign, double v_tol) {
  Vec x = start;
  for (double lambda = 1e2; lambda <= 1e10; lambda *= 100.0) {
    auto phi = [&](const Vec& y) {
      const double v = std::max(0.0, pair.V(t, y));
      return sign * pair.W(t, y) + 0.5 * lambda * v * v;
    };
    auto grad = [&](const Vec& y) -> Vec {
      const double v = std::max(0.0, pair.V(t, y));
      Vec g = sign * pair.W.gradient(t, y);
      if (v > 0.0) g += lambda * v * pair.V.gradient(t, y);
      return g;
    };
    BfgsOptions bo;
    bo.max_iter = 300;
    const OptimizeResult r = bfgs(phi, grad, x, bo);
    if (!r.x.allFinite()) return std::nullopt;
    x = r.x;
  }
  if (pair.V(t, x) > v_tol && !project_to_level(pair.V, t, x, v_tol)) return std::nullopt;
  const double w = pair.W(t, x);
  if (!std::isfinite(w)) return std::nullopt;
  return Candidate{w, x};
}

}  // namespace

LevelExtrema level_extrema(const VWPair& pair, double t, const LevelSetOptions& opt) {
  Vec lo = opt.lo, hi = opt.hi;
  if (lo.size() == 0) {
    if (!pair.omega.bounded())
      throw std::invalid_argument("level_extrema: a finite search box is required");
    lo = pair.omega.lo;
    hi = pair.omega.hi;
  }
  const int n = static_cast<int>(lo.size());
  Halton h(n, opt.seed);
  std::vector<Vec> starts;
  for (int i = 0; i < opt.starts; ++i) starts.push_back(lo + (hi - lo).cwiseProduct(h.next()));

  LevelExtrema out;
  std::optional<Candidate> best_min, best_max;
  for (const Vec& s : starts) {
    bool accepted = false;
    for (double sign : {1.0, -1.0}) {
      auto& best = sign > 0 ? best_min : best_max;
      std::vector<std::optional<Candidate>> found;
      found.push_back(level_search(pair, t, s, sign, opt.v_tol));
      if (opt.include_interior) found.push_back(sublevel_search(pair, t, s, sign, opt.v_tol));
      for (auto& c : found) {
        if (!c) continue;
        accepted = true;
        if (!best || better(*c, *best, sign)) best = c;
      }
    }
    if (accepted) ++out.accepted_starts;
  }
  if (!best_min || !best_max) {
    std::ostringstream os;
    os << "no point with |V| <= " << opt.v_tol << " found at t = " << t;
    throw Error(ErrorCode::LevelSetNotFound, os.str());
  }
  out.w0 = best_min->w;
  out.argmin = best_min->x;
  out.w_sup = best_max->w;
  out.argmax = best_max->x;
  out.consistent = pair.w_lower < out.w0 && out.w0 <= out.w_sup && out.w_sup < pair.w_upper;
  return out;
}

Horizon horizon_from_grid(std::vector<double> t, std::vector<double> alpha,
                          std::vector<double> w0, std::vector<double> w_sup) {
  const std::size_t n = t.size();
  if (n < 2 || alpha.size() != n || w0.size() != n || w_sup.size() != n)
    throw std::invalid_argument("horizon_from_grid: need at least two matching grid values");
  for (std::size_t i = 1; i < n; ++i)
    if (!(t[i] > t[i - 1])) throw std::invalid_argument("horizon_from_grid: grid must increase");
  Horizon h;
  h.cumulative.assign(n, 0.0);
  for (std::size_t i = 1; i < n; ++i)
    h.cumulative[i] = h.cumulative[i - 1] + 0.5 * (t[i] - t[i - 1]) * (alpha[i] + alpha[i - 1]);
  h.omega0 = *std::min_element(w0.begin(), w0.end());
  h.omega_sup = *std::max_element(w_sup.begin(), w_sup.end());
  h.alpha_min = *std::min_element(alpha.begin(), alpha.end());
  h.t = std::move(t);
  h.alpha = std::move(alpha);
  h.w0 = std::move(w0);
  h.w_sup = std::move(w_sup);
  return h;
}

namespace {

double cumulative_at(const Horizon& h, double x) {
  const double slack = 1e-12 * (1.0 + std::abs(x));
  if (x < h.t.front() - slack || x > h.t.back() + slack)
    throw Error(ErrorCode::OutOfSpan, "time outside the horizon grid");
  x = std::clamp(x, h.t.front(), h.t.back());
  auto it = std::upper_bound(h.t.begin(), h.t.end(), x);
  std::size_t i = static_cast<std::size_t>(it - h.t.begin());
  i = std::min(std::max<std::size_t>(i, 1), h.t.size() - 1) - 1;
  const double dt = h.t[i + 1] - h.t[i];
  const double a = h.alpha[i] + (h.alpha[i + 1] - h.alpha[i]) * (x - h.t[i]) / dt;
  return h.cumulative[i] + 0.5 * (x - h.t[i]) * (h.alpha[i] + a);
}

}  // namespace

double Horizon::integral(double a, double b) const {
  return cumulative_at(*this, b) - cumulative_at(*this, a);
}

double Horizon::tau_plus(double t0) const {
  const double D = spread();
  if (!(D > 0.0)) return t0;
  const double target = cumulative_at(*this, t0) + D;
  auto g = [&](double x) { return cumulative_at(*this, x) - target; };
  double a = t0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= t0) continue;
    if (cumulative[i] >= target) {
      if (g(a) >= 0.0) return a;
      return brent_root(g, a, t[i]);
    }
    a = t[i];
  }
  throw Error(ErrorCode::WindowTooShort, "integral of alpha does not reach the spread forward");
}

double Horizon::tau_minus(double t0) const {
  const double D = spread();
  if (!(D > 0.0)) return t0;
  const double target = cumulative_at(*this, t0) - D;
  auto g = [&](double x) { return cumulative_at(*this, x) - target; };
  double b = t0;
  for (std::size_t k = t.size(); k-- > 0;) {
    if (t[k] >= t0) continue;
    if (cumulative[k] <= target) {
      if (g(b) <= 0.0) return b;
      return brent_root(g, t[k], b);
    }
    b = t[k];
  }
  throw Error(ErrorCode::WindowTooShort, "integral of alpha does not reach the spread backward");
}

Horizon horizon_quantities(const VWPair& pair, const VectorField& field,
                           const std::vector<double>& grid, const RegionSampler& sampler,
                           const HorizonOptions& opt) {
  std::vector<double> alpha, w0, ws;
  for (double t : grid) {
    alpha.push_back(opt.alpha_lower ? opt.alpha_lower(t) : estimate_alpha(pair, field, sampler, t));
    const LevelExtrema le = level_extrema(pair, t, opt.level);
    w0.push_back(le.w0);
    ws.push_back(le.w_sup);
  }
  return horizon_from_grid(grid, std::move(alpha), std::move(w0), std::move(ws));
}

double v_bound(double c_lower, double c_upper, double omega0, double omega_sup) {
  const double D = omega_sup - omega0;
  if (!(D > 0.0)) return 0.0;
  if (std::isinf(c_lower)) return c_upper * D;
  if (c_lower + c_upper == 0.0) return 0.0;
  return c_lower * c_upper / (c_lower + c_upper) * D;
}

double v_bound(const VWPair& pair, double omega0, double omega_sup) {
  return v_bound(pair.c_lower, pair.c_upper, omega0, omega_sup);
}

ConditionReport trajectory_check(const VWPair& pair, const Trajectory& traj,
                                 const TrajectoryCheckOptions& opt) {
  pair.validate();
  ConditionReport rep;
  rep.condition = "trajectory_estimates";
  const std::size_t n = std::max<std::size_t>(opt.grid, 2);
  const double ta = traj.t_begin(), tb = traj.t_end();
  std::vector<double> ts(n), v(n), w(n);
  const double wtol = opt.tol * (1.0 + std::max(std::abs(pair.w_lower), std::abs(pair.w_upper)));
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = i + 1 == n ? tb : ta + (tb - ta) * static_cast<double>(i) / static_cast<double>(n - 1);
    const Vec x = traj.evaluate(ts[i]);
    v[i] = pair.V(ts[i], x);
    w[i] = pair.W(ts[i], x);
    if (w[i] < pair.w_lower - wtol || w[i] > pair.w_upper + wtol) {
      std::ostringstream os;
      os << "W = " << w[i] << " outside (" << pair.w_lower << ", " << pair.w_upper << ")";
      throw Error(ErrorCode::TrajectoryLeftW, os.str(), ts[i], x);
    }
  }
  rep.samples = n;

  auto vt = [&](double t) { return pair.V(t, traj.evaluate(t)); };
  auto wt = [&](double t) { return pair.W(t, traj.evaluate(t)); };
  const bool inf_lower = std::isinf(pair.c_lower);
  const double cl = pair.c_lower, cu = pair.c_upper;
  const double a2 = inf_lower ? 1.0 : cl / (cl + cu);
  const double b2 = inf_lower ? cu : cl * cu / (cl + cu);

  int runs = 0, bounded_runs = 0, violations = 0;
  bool any_check = false;
  rep.worst_value = -kInf;
  for (std::size_t i = 0; i < n;) {
    if (!(v[i] > 0.0)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] > 0.0) ++j;
    ++runs;
    double t0 = ts[i];
    if (i > 0) t0 = brent_root(vt, ts[i - 1], ts[i], 1e-14);
    const double v0 = std::max(0.0, i > 0 ? 0.0 : v[0]);
    const double w0 = wt(t0);
    std::optional<double> t1;
    if (j + 1 < n) {
      t1 = brent_root(vt, ts[j], ts[j + 1], 1e-14);
      ++bounded_runs;
    }
    const double rhs1 = v0 + cu * (pair.w_upper - w0);
    const double rhs2 = t1 ? a2 * v0 + b2 * (wt(*t1) - w0) : kInf;
    for (std::size_t k = i; k <= j; ++k) {
      const double e1 = v[k] - rhs1;
      const double tol1 = opt.tol * (1.0 + std::abs(rhs1));
      any_check = true;
      if (e1 > rep.worst_value) {
        rep.worst_value = e1;
        rep.witness_t = ts[k];
        rep.witness_x = traj.evaluate(ts[k]);
      }
      if (e1 > tol1) ++violations;
      if (t1) {
        const double e2 = v[k] - rhs2;
        if (e2 > opt.tol * (1.0 + std::abs(rhs2))) {
          ++violations;
          if (e2 > rep.worst_value) {
            rep.worst_value = e2;
            rep.witness_t = ts[k];
            rep.witness_x = traj.evaluate(ts[k]);
          }
        }
      }
    }
    if (opt.alpha) {
      const double te = t1 ? *t1 : ts[j];
      const double I = integrate_gk(opt.alpha, t0, te, 1e-10, 1e-10);
      const double cap = pair.w_upper - pair.w_lower;
      const double e3 = I - cap;
      if (e3 > opt.tol * (1.0 + cap)) {
        ++violations;
        if (e3 > rep.worst_value) {
          rep.worst_value = e3;
          rep.witness_t = te;
          rep.witness_x = traj.evaluate(te);
        }
      }
    }
    i = j + 1;
  }
  if (!any_check) {
    rep.status = Status::Pass;
    rep.worst_value = 0.0;
    rep.notes.push_back("vacuous: V <= 0 along the trajectory");
  } else {
    rep.status = violations ? Status::Fail : Status::Pass;
    const char* label = bounded_runs == 0 ? "I" : (bounded_runs == 1 ? "II" : "III");
    rep.notes.push_back(std::string("case ") + label);
  }
  rep.constants["positive_runs"] = runs;
  rep.constants["runs_between_zeros"] = bounded_runs;
  rep.constants["violations"] = violations;
  return rep;
}

double PairField::derivative_along(const VectorField& f, double t, const Vec& x,
                                   const Vec& y) const {
  double d = dt ? dt(t, x, y) : 0.0;
  if (!dt) {
    const double h = fd_step(t);
    d = (value(t + h, x, y) - value(t - h, x, y)) / (2 * h);
  }
  auto fd_grad = [&](bool wrt_x) {
    Vec g(x.size());
    Vec xx = x, yy = y;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      Vec& z = wrt_x ? xx : yy;
      const double zi = z[i], h = fd_step(zi);
      z[i] = zi + h;
      const double up = value(t, xx, yy);
      z[i] = zi - h;
      const double dn = value(t, xx, yy);
      z[i] = zi;
      g[i] = (up - dn) / (2 * h);
    }
    return g;
  };
  const Vec gx = grad_x ? grad_x(t, x, y) : fd_grad(true);
  const Vec gy = grad_y ? grad_y(t, x, y) : fd_grad(false);
  return d + gx.dot(f(t, x)) + gy.dot(f(t, y));
}

ConditionReport uniqueness_certificate(const UniquenessProblem& prob, const VectorField& field,
                                       double t0, double t1, const RegionSampler& sampler) {
  ConditionReport rep;
  rep.condition = "uniqueness";
  const Eigen::Index n = field.dim;
  double margin_min = kInf;
  bool fail2 = false;
  std::vector<double> ts = sampler.times(t0, t1);
  std::vector<double> u_max(ts.size(), 0.0);
  for (std::size_t s = 0; s < ts.size(); ++s) {
    const double t = ts[s];
    for (const Vec& z : sampler.samples(t)) {
      const Vec x = z.head(n), y = z.tail(n);
      if (std::max(prob.V(t, x), prob.V(t, y)) > prob.r) continue;
      ++rep.samples;
      const double u = prob.U.value(t, x, y);
      const double ud = prob.U.derivative_along(field, t, x, y);
      const double rhs = prob.beta(t, prob.r) * prob.eta(std::abs(u));
      const double m = ud - rhs;
      const double tol = 1e-9 * (std::abs(ud) + std::abs(rhs)) + 1e-14;
      u_max[s] = std::max(u_max[s], std::abs(u));
      if (m < margin_min) {
        margin_min = m;
        rep.witness_t = t;
        rep.witness_x = z;
      }
      if (m < -tol) fail2 = true;
      if (std::abs(u) <= 1e-14 && (x - y).norm() > 1e-8 && !(ud > 0.0)) fail2 = true;
    }
  }
  if (rep.samples == 0)
    throw Error(ErrorCode::EmptyRegion, "no sampled pair with max(V(x), V(y)) <= r");
  rep.worst_value = -margin_min;
  rep.constants["condition2_margin"] = margin_min;

  // Condition 3 on the window: trapezoid integrals of beta from 0 to each end.
  const std::size_t m = 2001;
  auto beta_integral = [&](double a, double b) {
    if (a == b) return 0.0;
    double sum = 0.0;
    const double h = (b - a) / static_cast<double>(m - 1);
    for (std::size_t i = 0; i < m; ++i) {
      const double wgt = (i == 0 || i + 1 == m) ? 0.5 : 1.0;
      sum += wgt * prob.beta(a + h * static_cast<double>(i), prob.r);
    }
    return sum * h;
  };
  auto h_of = [&](double u) {
    if (!(u > 0.0)) return -kInf;
    return integrate_gk([&](double s) { return 1.0 / prob.eta(s); }, 1.0, u, 1e-12, 1e-12);
  };
  auto b_at = [&](double t, std::size_t slice) {
    return prob.b ? prob.b(t, prob.r) : u_max[slice];
  };
  const double Ip = beta_integral(0.0, t1);
  const double Im = beta_integral(t0, 0.0);
  rep.constants["beta_integral_forward"] = Ip;
  rep.constants["beta_integral_backward"] = Im;
  bool fail3 = false;
  const double tiny = 1e-12;
  if (!(Ip > tiny) || !(Im > tiny)) {
    fail3 = true;
    rep.notes.push_back("integral of beta does not grow in both directions on the window");
  } else {
    const double ratio_p = h_of(b_at(t1, ts.size() - 1)) / Ip;
    const double ratio_m = h_of(b_at(t0, 0)) / Im;
    rep.constants["ratio_forward"] = ratio_p;
    rep.constants["ratio_backward"] = ratio_m;
    if (!(ratio_p < 1.0) || !(ratio_m < 1.0)) fail3 = true;
  }
  // Integrability of 1/eta at zero switches to a criterion not implemented here.
  const double near = integrate_gk([&](double s) { return 1.0 / prob.eta(s); }, 1e-12, 1.0, 1e-9, 1e-9);
  const double far = integrate_gk([&](double s) { return 1.0 / prob.eta(s); }, 1e-6, 1.0, 1e-9, 1e-9);
  if (std::isfinite(near) && near < 1.5 * far)
    rep.notes.push_back("1/eta integrable at 0: alternative criterion not implemented");

  if (fail2 || fail3) {
    rep.status = Status::Fail;
    if (fail3) rep.notes.push_back("condition 3 fails");
    if (fail2) rep.notes.push_back("condition 2 fails");
  } else {
    rep.status = Status::Pass;
  }
  return rep;
}

}  // namespace vw
