#include "vw/shooting.hpp"

#include "vw/kernels.hpp"
#include "vw/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace vw {

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::Exited: return "exited";
    case Outcome::Stayed: return "stayed_to_horizon";
    case Outcome::BlewUp: return "blew_up";
  }
  return "blew_up";
}

ExitClassification classify(const VectorField& field, const VWPair& pair, double t_start,
                            const Vec& x0, double t_horizon, const ShootingConfig& cfg) {
  if (t_horizon < t_start) throw std::invalid_argument("classify: horizon precedes start");
  ExitClassification out;
  const double w0 = pair.W(t_start, x0);
  const double wtol = cfg.integ.event_tol * (1.0 + std::abs(pair.w_upper));
  out.max_V = pair.V(t_start, x0);
  if (w0 > pair.w_upper + wtol ||
      (w0 >= pair.w_upper - wtol && lie_derivative(pair.W, field, t_start, x0) > 0.0)) {
    out.outcome = Outcome::Exited;
    out.t_end = t_start;
    out.x_end = x0;
    out.W_end = w0;
    out.reason = "immediate exit";
    return out;
  }

  std::vector<EventSpec> events;
  events.push_back({[&](double t, const Vec& x) { return pair.W(t, x) - pair.w_upper; },
                    Crossing::Rising, true, "exit"});
  if (std::isfinite(pair.V_cap))
    events.push_back({[&](double t, const Vec& x) { return pair.V(t, x) - pair.V_cap; },
                      Crossing::Rising, false, "v_cap"});
  try {
    const IntegrationResult res = integrate(field, t_start, x0, t_horizon, cfg.integ, events);
    const Trajectory& tr = res.trajectory;
    for (std::size_t i = 0; i < tr.size(); ++i)
      out.max_V = std::max(out.max_V, pair.V(tr.time(i), tr.state(i)));
    for (const EventHit& h : res.events)
      if (h.index == 1) out.v_cap_reached = true;
    if (res.terminated_by_event) {
      const EventHit& h = res.events.back();
      out.outcome = Outcome::Exited;
      out.t_end = h.t;
      out.x_end = h.x;
    } else {
      out.outcome = Outcome::Stayed;
      out.t_end = tr.t_end();
      out.x_end = tr.state(tr.size() - 1);
    }
    out.W_end = pair.W(out.t_end, out.x_end);
  } catch (const Error& e) {
    switch (e.code()) {
      case ErrorCode::StepSizeUnderflow:
      case ErrorCode::NonFiniteState:
      case ErrorCode::NonFiniteValue:
      case ErrorCode::MaxStepsExceeded:
        out.outcome = Outcome::BlewUp;
        out.t_end = e.time().value_or(t_start);
        out.x_end = e.state().size() ? e.state() : x0;
        out.W_end = pair.W(out.t_end, out.x_end);
        out.reason = e.what();
        break;
      default:
        throw;
    }
  }
  return out;
}

namespace {

struct Scored {
  Vec u;
  double time = -kInf;
  bool stayed = false;
};

bool lex_less(const Vec& a, const Vec& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

bool better(const Scored& a, const Scored& b) {
  if (a.time != b.time) return a.time > b.time;
  return lex_less(a.u, b.u);
}

StayingResult finish(const InitialSet& init, const Scored& s, int count, const char* method) {
  StayingResult r;
  r.param = s.u;
  r.x0 = init.map(s.u);
  r.exit_time = s.time;
  r.stayed = s.stayed;
  r.classifications = count;
  r.method = method;
  return r;
}

}  // namespace

StayingResult find_staying_parameter(const VectorField& field, const VWPair& pair,
                                     const InitialSet& init, double t_horizon,
                                     const ShootingConfig& cfg) {
  if (init.p < 1 || !init.map) throw std::invalid_argument("InitialSet needs p >= 1 and a map");
  const double full = t_horizon - init.t;
  int count = 0;
  auto run = [&](const Vec& u) {
    ++count;
    const ExitClassification c = classify(field, pair, init.t, init.map(u), t_horizon, cfg);
    return c;
  };
  auto score = [&](const Vec& u) {
    const ExitClassification c = run(u);
    Scored s;
    s.u = u;
    s.stayed = c.outcome == Outcome::Stayed;
    s.time = c.t_end - init.t;
    return s;
  };

  if (init.p == 1) {
    const Vec e0 = Vec::Zero(1), e1 = Vec::Ones(1);
    const Vec axis = init.map(e1) - init.map(e0);
    auto side = [&](const ExitClassification& c) {
      if (init.exit_side) return init.exit_side(c.t_end, c.x_end);
      const double d = c.x_end.dot(axis);
      return d > 0 ? 1 : (d < 0 ? -1 : 0);
    };
    const ExitClassification c0 = run(e0), c1 = run(e1);
    const int s0 = c0.outcome != Outcome::Stayed ? side(c0) : 0;
    const int s1 = c1.outcome != Outcome::Stayed ? side(c1) : 0;
    if (s0 != 0 && s1 != 0 && s0 != s1) {
      double lo = 0.0, hi = 1.0;
      while (true) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi) || hi - lo <= cfg.param_tol) break;
        const ExitClassification c = run(Vec::Constant(1, mid));
        if (c.outcome == Outcome::Stayed) {
          Scored s{Vec::Constant(1, mid), full, true};
          return finish(init, s, count, "bisection");
        }
        if (side(c) == s0) lo = mid;
        else hi = mid;
      }
      return finish(init, score(Vec::Constant(1, 0.5 * (lo + hi))), count, "bisection");
    }
  }

  // Coarse grid, then simplex refinement of the exit time.
  int g = std::max(cfg.grid_per_dim, 1);
  while (g > 1 && std::pow(static_cast<double>(g), init.p) > static_cast<double>(cfg.grid_cap)) --g;
  std::vector<int> idx(init.p, 0);
  Scored best;
  bool all_immediate = true;
  while (true) {
    Vec u(init.p);
    for (int i = 0; i < init.p; ++i) u[i] = (idx[i] + 0.5) / g;
    const Scored s = score(u);
    if (s.time > 0.0) all_immediate = false;
    if (best.u.size() == 0 || better(s, best)) best = s;
    int k = 0;
    while (k < init.p && ++idx[k] == g) idx[k++] = 0;
    if (k == init.p) break;
  }
  if (all_immediate)
    throw Error(ErrorCode::NoInteriorCandidate,
                "every sampled initial condition exits immediately; check w* and M_t");
  if (best.stayed) return finish(init, best, count, "grid");

  auto objective = [&](const Vec& u) {
    Vec c = u.cwiseMax(0.0).cwiseMin(1.0);
    const Scored s = score(c);
    if (better(s, best)) best = s;
    return -s.time + (u - c).norm();
  };
  double step = 0.5 / g;
  for (int r = 0; r < cfg.simplex_restarts && !best.stayed; ++r) {
    NelderMeadOptions nm;
    nm.initial_step = step;
    nm.x_tol = std::max(cfg.param_tol, 1e-16);
    nm.f_target = -full;
    nm.max_iter = cfg.simplex_max_iter;
    nm.stall_iter = 60;
    nelder_mead(objective, best.u, nm);
    step *= 0.25;
  }
  return finish(init, best, count, "grid+simplex");
}

ShootingCertificate certify(const Trajectory& traj, const VWPair& pair, double omega0,
                            double omega_sup, double bound, std::size_t grid) {
  ShootingCertificate c;
  c.trajectory = traj;
  c.bound_V = bound;
  c.omega0 = omega0;
  c.omega_sup = omega_sup;
  const std::size_t n = std::max<std::size_t>(grid, 1000);
  const double ta = traj.t_begin(), tb = traj.t_end();
  std::vector<double> ts(n), v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = i + 1 == n ? tb : ta + (tb - ta) * static_cast<double>(i) / static_cast<double>(n - 1);
    const Vec x = traj.evaluate(ts[i]);
    v[i] = pair.V(ts[i], x);
    w[i] = pair.W(ts[i], x);
  }
  c.sup_V = kernels::max_value(v.data(), n);
  kernels::minmax(w.data(), n, &c.W_min, &c.W_max);

  const double slack = 1e-6 * (1.0 + std::abs(bound));
  auto locate = [&](const std::vector<double>& a, double target) {
    for (std::size_t i = 0; i < n; ++i)
      if (a[i] == target) return ts[i];
    return ts[0];
  };
  auto entry = [&](std::string name, double measured, double limit, double margin,
                   const std::vector<double>& arr) {
    CertificateEntry e;
    e.name = std::move(name);
    e.measured = measured;
    e.bound = limit;
    e.margin = margin;
    e.status = margin >= -slack ? Status::Pass : Status::Fail;
    if (e.status == Status::Fail) {
      e.witness_t = locate(arr, measured);
      if (!c.witness_t) {
        c.witness_t = e.witness_t;
        c.witness_x = traj.evaluate(*e.witness_t);
      }
    }
    c.entries.push_back(e);
  };
  entry("sup_V", c.sup_V, bound, bound - c.sup_V, v);
  entry("W_min", c.W_min, omega0, c.W_min - omega0, w);
  entry("W_max", c.W_max, omega_sup, omega_sup - c.W_max, w);
  c.status = Status::Pass;
  for (const auto& e : c.entries)
    if (e.status == Status::Fail) c.status = Status::Fail;
  return c;
}

namespace {

Vec state_at_end(const Trajectory& tr) { return tr.state(tr.size() - 1); }

Trajectory run_between(const VectorField& field, double t0, const Vec& x0, double t1,
                       const IntegratorConfig& cfg) {
  return integrate(field, t0, x0, t1, cfg).trajectory;
}

}  // namespace

ShootingCertificate extract_limit_solution(const VectorField& field, const VWPair& pair,
                                           const InitialSetFamily& family,
                                           const std::vector<double>& t_sequence,
                                           double T_anchor, const ShootingConfig& cfg,
                                           const LimitBounds& bounds) {
  if (t_sequence.size() < 3)
    throw std::invalid_argument("extract_limit_solution: at least three start times required");
  for (std::size_t i = 1; i < t_sequence.size(); ++i)
    if (!(t_sequence[i] < t_sequence[i - 1]))
      throw std::invalid_argument("extract_limit_solution: start times must decrease");
  if (!(T_anchor > 0.0)) throw std::invalid_argument("extract_limit_solution: T must be positive");

  // Staying solution launched at t_start, carried to time s.
  auto anchor = [&](double t_start, double s) {
    const InitialSet init = family(t_start);
    const StayingResult sr = find_staying_parameter(field, pair, init, s + cfg.horizon, cfg);
    if (t_start == s) return sr.x0;
    return state_at_end(run_between(field, t_start, sr.x0, s, cfg.integ));
  };

  const double a = cfg.anchor_time;
  std::vector<Vec> anchors;
  std::vector<double> diffs;
  std::optional<std::size_t> converged;
  for (std::size_t j = 0; j < t_sequence.size(); ++j) {
    anchors.push_back(anchor(t_sequence[j], a));
    if (j > 0) {
      diffs.push_back((anchors[j] - anchors[j - 1]).norm());
      if (diffs.back() <= cfg.anchor_tol) {
        converged = j;
        break;
      }
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "anchor differences did not fall below " << cfg.anchor_tol << ":";
    for (double d : diffs) os << ' ' << d;
    throw Error(ErrorCode::AnchorsNotCauchy, os.str());
  }

  Trajectory traj;
  double residual = diffs.back();
  const Vec& xi = anchors.back();
  if (cfg.stitch_spacing <= 0.0) {
    traj = run_between(field, a, xi, a - T_anchor, cfg.integ);
    traj.append(run_between(field, a, xi, a + T_anchor, cfg.integ));
  } else {
    const double offset = t_sequence[*converged] - a;
    const int K = std::max(1, static_cast<int>(std::ceil(2.0 * T_anchor / cfg.stitch_spacing)));
    std::vector<double> s(K + 1);
    for (int k = 0; k <= K; ++k) s[k] = a - T_anchor + 2.0 * T_anchor * k / K;
    std::optional<Vec> prev_end;
    for (int k = 0; k <= K; ++k) {
      const Vec xk = k == K / 2 && s[k] == a ? xi : anchor(s[k] + offset, s[k]);
      const double L = k == 0 ? s[0] : 0.5 * (s[k - 1] + s[k]);
      const double R = k == K ? s[K] : 0.5 * (s[k] + s[k + 1]);
      Trajectory piece;
      if (L < s[k]) {
        piece = run_between(field, s[k], xk, L, cfg.integ);
        if (R > s[k]) piece.append(run_between(field, s[k], xk, R, cfg.integ));
      } else {
        piece = run_between(field, s[k], xk, R, cfg.integ);
      }
      if (prev_end) residual = std::max(residual, (piece.state(0) - *prev_end).norm());
      prev_end = state_at_end(piece);
      if (k == 0) traj = std::move(piece);
      else traj.append(piece);
    }
  }

  ShootingCertificate cert = certify(traj, pair, bounds.omega0, bounds.omega_sup, bounds.bound);
  cert.anchors = std::move(anchors);
  cert.anchor_starts.assign(t_sequence.begin(), t_sequence.begin() + *converged + 1);
  cert.anchor_diffs = std::move(diffs);
  cert.cauchy_residual = residual;
  return cert;
}

}  // namespace vw
