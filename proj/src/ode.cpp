#include "vw/ode.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>

namespace vw {

// ---------------------------------------------------------------- fields

Vec ScalarField::fd_gradient(double t, const Vec& x) const {
  Vec g(x.size());
  Vec y = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = fd_step(x[i]);
    y[i] = x[i] + h;
    const double up = value(t, y);
    y[i] = x[i] - h;
    const double dn = value(t, y);
    y[i] = x[i];
    g[i] = (up - dn) / (2.0 * h);
  }
  return g;
}

double ScalarField::fd_time_partial(double t, const Vec& x) const {
  const double h = fd_step(t);
  return (value(t + h, x) - value(t - h, x)) / (2.0 * h);
}

Vec ScalarField::gradient(double t, const Vec& x) const {
  return grad ? grad(t, x) : fd_gradient(t, x);
}

double ScalarField::time_partial(double t, const Vec& x) const {
  return dt ? dt(t, x) : fd_time_partial(t, x);
}

static double checked(double v, double t, const Vec& x) {
  if (!std::isfinite(v)) throw Error(ErrorCode::NonFiniteValue, "non-finite Lie derivative", t, x);
  return v;
}

double lie_derivative(const ScalarField& U, const VectorField& field, double t, const Vec& x) {
  return checked(U.time_partial(t, x) + U.gradient(t, x).dot(field.f(t, x)), t, x);
}

double lie_derivative_fd(const ScalarField& U, const VectorField& field, double t, const Vec& x) {
  return checked(U.fd_time_partial(t, x) + U.fd_gradient(t, x).dot(field.f(t, x)), t, x);
}

// ---------------------------------------------------------------- config

void IntegratorConfig::validate() const {
  if (!(rtol > 0) || !(atol > 0) || !(event_tol > 0) || !(min_step > 0) || !(max_step > 0))
    throw std::invalid_argument("integrator tolerances and step bounds must be positive");
  if (min_step > max_step) throw std::invalid_argument("min_step exceeds max_step");
  if (max_steps == 0) throw std::invalid_argument("max_steps must be positive");
}

// ---------------------------------------------------------------- trajectory

namespace {

Vec eval_poly(const Trajectory::Segment& s, double t) {
  const double th = (t - s.t_start) / s.h;
  const double th1 = 1.0 - th;
  return s.r[0] + th * (s.r[1] + th1 * (s.r[2] + th * (s.r[3] + th1 * s.r[4])));
}

Vec eval_hermite(double t0, const Vec& x0, const Vec& d0, double t1, const Vec& x1,
                 const Vec& d1, double t) {
  const double h = t1 - t0;
  const double s = (t - t0) / h;
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1;
}

}  // namespace

Trajectory Trajectory::from_nodes(std::vector<double> times, std::vector<Vec> states,
                                  std::vector<Vec> derivatives) {
  if (times.empty() || times.size() != states.size() || times.size() != derivatives.size())
    throw std::invalid_argument("node arrays must be nonempty and of equal length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("node times must increase strictly");
  Trajectory tr;
  tr.t_ = std::move(times);
  tr.x_ = std::move(states);
  tr.dx_ = std::move(derivatives);
  tr.seg_.resize(tr.t_.size() - 1);
  return tr;
}

bool Trajectory::has_dense_coefficients() const {
  return std::any_of(seg_.begin(), seg_.end(), [](const Segment& s) { return s.r[0].size() > 0; });
}

void Trajectory::push_node(double t, const Vec& x, const Vec& dx) {
  t_.push_back(t);
  x_.push_back(x);
  dx_.push_back(dx);
}

void Trajectory::replace_last_node(double t, const Vec& x, const Vec& dx) {
  t_.back() = t;
  x_.back() = x;
  dx_.back() = dx;
}

void Trajectory::reverse_order() {
  std::reverse(t_.begin(), t_.end());
  std::reverse(x_.begin(), x_.end());
  std::reverse(dx_.begin(), dx_.end());
  std::reverse(seg_.begin(), seg_.end());
}

Vec Trajectory::evaluate(double t) const {
  if (t_.empty()) throw Error(ErrorCode::OutOfSpan, "empty trajectory");
  const double slack = 1e-12 * (1.0 + std::abs(t));
  if (t < t_.front() - slack || t > t_.back() + slack || std::isnan(t))
    throw Error(ErrorCode::OutOfSpan, "time " + std::to_string(t) + " outside [" +
                                          std::to_string(t_.front()) + ", " +
                                          std::to_string(t_.back()) + "]");
  if (t <= t_.front()) return x_.front();
  if (t >= t_.back()) return x_.back();
  const auto it = std::upper_bound(t_.begin(), t_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - t_.begin()) - 1;
  if (t == t_[i]) return x_[i];
  const Segment& s = seg_[i];
  if (s.r[0].size() > 0) return eval_poly(s, t);
  return eval_hermite(t_[i], x_[i], dx_[i], t_[i + 1], x_[i + 1], dx_[i + 1], t);
}

Vec evaluate_dense(const Trajectory& traj, double t) { return traj.evaluate(t); }

void Trajectory::append(const Trajectory& next) {
  if (next.t_.empty()) return;
  if (t_.empty()) {
    *this = next;
    return;
  }
  if (std::abs(next.t_begin() - t_end()) > 1e-9 * (1.0 + std::abs(t_end())))
    throw std::invalid_argument("appended trajectory does not start at the current end");
  for (std::size_t i = 1; i < next.t_.size(); ++i) {
    t_.push_back(next.t_[i]);
    x_.push_back(next.x_[i]);
    dx_.push_back(next.dx_[i]);
  }
  seg_.insert(seg_.end(), next.seg_.begin(), next.seg_.end());
}

static void put_number(std::ostream& os, double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  os.write(buf, res.ptr - buf);
}

void Trajectory::write_csv(std::ostream& os) const {
  os << "t";
  for (int j = 0; j < dim(); ++j) os << ",x" << (j + 1);
  os << "\n";
  for (std::size_t i = 0; i < t_.size(); ++i) {
    put_number(os, t_[i]);
    for (Eigen::Index j = 0; j < x_[i].size(); ++j) {
      os << ',';
      put_number(os, x_[i][j]);
    }
    os << "\n";
  }
}

void Trajectory::write_csv(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_csv(os);
}

// ---------------------------------------------------------------- integrator

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

double rms_norm(const Vec& v, const Vec& scale) {
  return std::sqrt((v.array() / scale.array()).square().mean());
}

bool crosses(double g0, double g1, Crossing dir) {
  const bool rising = g0 < 0 && g1 >= 0;
  const bool falling = g0 > 0 && g1 <= 0;
  switch (dir) {
    case Crossing::Rising: return rising;
    case Crossing::Falling: return falling;
    case Crossing::Any: return rising || falling;
  }
  return false;
}

}  // namespace

// Event directions are relative to the direction of integration.
IntegrationResult integrate(const VectorField& field, double t0, const Vec& x0, double t_end,
                            const IntegratorConfig& cfg, const std::vector<EventSpec>& events) {
  cfg.validate();
  if (x0.size() != field.dim) throw std::invalid_argument("state dimension mismatch");
  IntegrationResult out;
  Trajectory& tr = out.trajectory;

  const double sigma = t_end >= t0 ? 1.0 : -1.0;
  auto rhs = [&](double s, const Vec& y) -> Vec {
    Vec v = field.f(sigma * s, y);
    if (v.size() != field.dim) throw std::invalid_argument("field returned wrong dimension");
    if (!v.allFinite() || !y.allFinite())
      throw Error(ErrorCode::NonFiniteState, "field returned a non-finite value", sigma * s, y);
    return sigma > 0 ? v : Vec(-v);
  };

  double s = sigma * t0;
  const double s_end = sigma * t_end;
  Vec y = x0;
  Vec k1 = rhs(s, y);
  tr.push_node(t0, y, sigma * k1);
  if (t_end == t0) return out;

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].g(t0, x0);

  // Initial step (Hairer & Wanner heuristic).
  const double hmax = std::min(cfg.max_step, s_end - s);
  Vec sk = cfg.atol + cfg.rtol * y.array().abs();
  double h;
  {
    const double dnf = rms_norm(k1, sk), dny = rms_norm(y, sk);
    h = (dnf <= 1e-5 || dny <= 1e-5) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, hmax);
    Vec y1 = y + h * k1;
    Vec f1 = rhs(s + h, y1);
    const double der2 = rms_norm(f1 - k1, sk) / h;
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100 * h, h1, hmax});
  }

  constexpr double safe = 0.9, beta = 0.04, facc1 = 5.0, facc2 = 0.1;
  const double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;
  bool reject = false;
  std::size_t steps = 0;

  while (true) {
    if (++steps > cfg.max_steps)
      throw Error(ErrorCode::MaxStepsExceeded, "step budget exhausted", sigma * s, y);
    h = std::min(h, cfg.max_step);
    bool last = false;
    if (s + 1.01 * h >= s_end) {
      h = s_end - s;
      last = true;
    }
    if (h < cfg.min_step || s + h == s)
      throw Error(ErrorCode::StepSizeUnderflow, "step size underflow", sigma * s, y);

    Vec k2 = rhs(s + c2 * h, y + h * a21 * k1);
    Vec k3 = rhs(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
    Vec k4 = rhs(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    Vec k5 = rhs(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    Vec k6 = rhs(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    Vec y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const double s1 = last ? s_end : s + h;
    Vec k7 = rhs(s1, y1);
    Vec errv = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    sk = cfg.atol + cfg.rtol * y.array().abs().max(y1.array().abs());
    const double err = rms_norm(errv, sk);
    const double fac11 = std::pow(std::max(err, 1e-300), expo1);

    if (!std::isfinite(err))
      throw Error(ErrorCode::NonFiniteState, "non-finite error estimate", sigma * s, y);

    if (err > 1.0) {
      h /= std::min(facc1, fac11 / safe);
      reject = true;
      continue;
    }

    // Accepted step: dense output coefficients in the original time variable.
    Trajectory::Segment seg;
    seg.t_start = sigma * s;
    seg.h = sigma * h;
    Vec ydiff = y1 - y;
    Vec bspl = h * k1 - ydiff;
    seg.r[0] = y;
    seg.r[1] = ydiff;
    seg.r[2] = bspl;
    seg.r[3] = ydiff - h * k7 - bspl;
    seg.r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    const double t_new = sigma * s1;
    tr.push_segment(seg);
    tr.push_node(t_new, y1, sigma * k7);

    // Event detection on the accepted step.
    std::vector<EventHit> hits;
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g1 = events[e].g(t_new, y1);
      if (crosses(g_prev[e], g1, events[e].direction)) {
        double a = 0.0, b = 1.0, ga = g_prev[e], gb = g1;
        Vec xa = y, xb = y1;
        for (int it = 0; it < 60 && b - a > 1e-17; ++it) {
          const double m = 0.5 * (a + b);
          const double tm = seg.t_start + m * seg.h;
          Vec xm = eval_poly(seg, tm);
          const double gm = events[e].g(tm, xm);
          if ((gm < 0) == (ga < 0) && gm != 0.0) {
            a = m, ga = gm, xa = xm;
          } else {
            b = m, gb = gm, xb = xm;
          }
        }
        EventHit hit;
        hit.index = e;
        const bool take_b = a == 0.0 || std::abs(gb) <= std::abs(ga);
        const double th = take_b ? b : a;
        hit.t = (th == 1.0) ? t_new : seg.t_start + th * seg.h;
        hit.x = take_b ? xb : xa;
        hit.g = take_b ? gb : ga;
        hits.push_back(std::move(hit));
      }
      g_prev[e] = g1;
    }
    std::stable_sort(hits.begin(), hits.end(), [&](const EventHit& p, const EventHit& q) {
      return sigma * p.t < sigma * q.t;
    });
    bool stop = false;
    for (auto& hit : hits) {
      out.events.push_back(hit);
      if (events[hit.index].terminal) {
        if (hit.t != t_new) {
          tr.replace_last_node(hit.t, hit.x, field.f(hit.t, hit.x));
        }
        stop = true;
        break;
      }
    }

    facold = std::max(err, 1e-4);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(facc2, std::min(facc1, fac / safe));
    double hnew = h / fac;
    if (reject) hnew = std::min(hnew, h);
    reject = false;

    s = s1;
    y = std::move(y1);
    k1 = std::move(k7);
    if (stop) {
      out.terminated_by_event = true;
      break;
    }
    if (last) break;
    h = hnew;
  }

  if (sigma < 0) tr.reverse_order();
  return out;
}

}  // namespace vw
