#include "vw/pipeline.hpp"

#include "vw/helicoid.hpp"
#include "vw/kernels.hpp"
#include "vw/quadform.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <numbers>
#include <set>
#include <sstream>

namespace vw {

namespace {

constexpr const char* kVersion = "1.0.0";
constexpr const char* kTrajectoryFile = "trajectory.csv";

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::ConfigError, what);
}

const std::vector<ExampleInfo> kExamples = {
    {"scalar-saddle", "generic-vw", "x' = x + sin t with V = x^2 - 9/4, W = x^2"},
    {"saddle-2d", "quasilinear", "dichotomic planar saddle with bounded Lipschitz forcing"},
    {"bvp-example", "bvp-example", "z'' - z = 0.1 sin t + 0.1 z as a quasilinear system"},
    {"pencil-cubic", "pencil", "planar cubic saddle, pencil S = diag(1,-1), B = I"},
    {"duffing-repeller", "lagrangian", "q'' = 2q + 4q^3 + sin t from a quasiconvex Lagrangian"},
    {"example-helicoid", "helicoid", "particle on a vibrating helicoid, chi = 1.5 + 0.1 sin t, k = 60"},
};

double param(const RunConfig& c, const std::string& key, double def) {
  const auto it = c.params.find(key);
  return it == c.params.end() ? def : it->second;
}

void allow(const RunConfig& c, const std::set<std::string>& params,
           const std::set<std::string>& tables) {
  for (const auto& [k, v] : c.params)
    if (!params.count(k)) config_error("unknown parameter '" + k + "' for system " + c.system);
  for (const auto& [k, v] : c.tables)
    if (!tables.count(k)) config_error("unknown table '" + k + "' for system " + c.system);
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

struct Window {
  double t0, t1;
  double centre() const { return 0.5 * (t0 + t1); }
  double half() const { return 0.5 * (t1 - t0); }
};

Window window_of(const RunConfig& c, double t0, double t1) {
  return {c.t0.value_or(t0), c.t1.value_or(t1)};
}

void apply_tolerances(const RunConfig& c, ShootingConfig& sc) {
  if (c.tolerances.rtol) sc.integ.rtol = *c.tolerances.rtol;
  if (c.tolerances.atol) sc.integ.atol = *c.tolerances.atol;
  if (c.tolerances.anchor_tol) sc.anchor_tol = *c.tolerances.anchor_tol;
  if (c.tolerances.param_tol) sc.param_tol = *c.tolerances.param_tol;
}

// Shooting defaults shared by the planar and scalar examples.
ShootingConfig base_shooting(const RunConfig& c, double anchor_tol) {
  ShootingConfig sc;
  sc.integ.rtol = 1e-10;
  sc.integ.atol = 1e-12;
  sc.param_tol = 0.0;
  sc.anchor_tol = anchor_tol;
  sc.horizon = 30.0;
  sc.stitch_spacing = 2.0;
  apply_tolerances(c, sc);
  return sc;
}

std::vector<double> start_sequence(const RunConfig& c, const Window& w, double def = 5.0) {
  const double step = param(c, "t_step", def);
  if (!(step > 0.0)) config_error("t_step must be positive");
  std::vector<double> seq;
  for (int j = 1; j <= 4; ++j) seq.push_back(w.centre() - step * j);
  return seq;
}

ReportLine bound_line(const std::string& name, double measured, double bound,
                      std::optional<double> witness = {}) {
  ReportLine l;
  l.name = name;
  l.measured = measured;
  l.bound = bound;
  l.margin = bound - measured;
  l.status = measured <= bound + 1e-6 * (1.0 + std::abs(bound)) ? Status::Pass : Status::Fail;
  if (l.status == Status::Fail) l.witness_t = witness;
  return l;
}

ReportLine line_from(const CertificateEntry& e) {
  ReportLine l;
  l.name = e.name;
  l.status = e.status;
  l.measured = e.measured;
  l.bound = e.bound;
  l.margin = e.margin;
  l.witness_t = e.witness_t;
  return l;
}

struct Run {
  explicit Run(const RunConfig& c) : cfg(c) {}
  const RunConfig& cfg;
  Json report;
  Json constants = Json::object();
  Json conditions = Json::array();
  std::vector<ReportLine> lines;
  std::optional<Trajectory> trajectory;

  void condition(const ConditionReport& r) {
    conditions.push_back(to_json(r));
    lines.push_back(vw::line_from(r));
  }
  void shooting(const ShootingCertificate& c) {
    report["shooting"] = to_json(c, kTrajectoryFile);
    for (const CertificateEntry& e : c.entries) lines.push_back(line_from(e));
    trajectory = c.trajectory;
  }
};

double sup_norm(const Trajectory& tr, std::size_t grid, double* witness) {
  double best = 0.0;
  for (double t : linspace(tr.t_begin(), tr.t_end(), grid)) {
    const double v = tr.evaluate(t).norm();
    if (v > best) {
      best = v;
      *witness = t;
    }
  }
  return best;
}

// ---------------------------------------------------------------- generic-vw

void scalar_saddle(Run& run) {
  const RunConfig& c = run.cfg;
  allow(c, {"t_step"}, {});
  const Window w = window_of(c, -20.0, 20.0);
  const double r0 = 1.5;

  VectorField f;
  f.dim = 1;
  f.f = [](double t, const Vec& x) { return Vec::Constant(1, x[0] + std::sin(t)); };
  f.jacobian = [](double, const Vec&) { return Mat::Identity(1, 1); };
  f.time_derivative = [](double t, const Vec&) { return Vec::Constant(1, std::cos(t)); };

  VWPair p;
  p.V.value = [r0](double, const Vec& x) { return x[0] * x[0] - r0 * r0; };
  p.V.grad = [](double, const Vec& x) { return Vec::Constant(1, 2.0 * x[0]); };
  p.V.dt = [](double, const Vec&) { return 0.0; };
  p.W.value = [](double, const Vec& x) { return x[0] * x[0]; };
  p.W.grad = [](double, const Vec& x) { return Vec::Constant(1, 2.0 * x[0]); };
  p.W.dt = [](double, const Vec&) { return 0.0; };
  p.c_lower = kInf;
  p.c_upper = 1.0;

  LevelSetOptions lo;
  lo.lo = Vec::Constant(1, -4.0);
  lo.hi = Vec::Constant(1, 4.0);
  lo.include_interior = true;
  lo.seed = c.seed + 6;
  const LevelExtrema ex = level_extrema(p, w.centre(), lo);
  const double spread = ex.w_sup - ex.w0;
  p.w_lower = ex.w0 - 0.01 * spread;
  p.w_upper = ex.w_sup + 0.01 * spread;
  const double w_up = p.w_upper;

  InitialSetFamily family = [w_up](double t) {
    InitialSet init;
    init.p = 1;
    init.t = t;
    init.map = [w_up](const Vec& u) { return Vec::Constant(1, std::sqrt(w_up) * (2.0 * u[0] - 1.0)); };
    return init;
  };
  double nu = -kInf;
  const InitialSet m0 = family(w.t0);
  for (double u : linspace(0.0, 1.0, 201)) {
    const Vec x = m0.map(Vec::Constant(1, u));
    nu = std::max(nu, p.V(w.t0, x) - p.c_upper * p.W(w.t0, x));
  }
  p.V_cap = p.c_upper * p.w_upper + std::max(nu, -p.c_upper * p.w_lower);
  p.validate();

  const RegionSampler sampler = RegionSampler::fixed_box(
      Vec::Constant(1, -3.0), Vec::Constant(1, 3.0), 20001, c.seed, SamplingStrategy::Grid);
  run.condition(check_condition_A(p, f, sampler, w.t0, w.t1));

  const double bound = v_bound(p, ex.w0, ex.w_sup);
  ShootingConfig sc = base_shooting(c, 1e-8);
  sc.anchor_time = w.centre();
  const ShootingCertificate cert = extract_limit_solution(
      f, p, family, start_sequence(c, w), w.half(), sc, {ex.w0, ex.w_sup, bound});
  run.shooting(cert);

  run.condition(trajectory_check(p, cert.trajectory));

  run.constants["r0"] = r0;
  run.constants["omega0"] = ex.w0;
  run.constants["omega_sup"] = ex.w_sup;
  run.constants["w_lower"] = p.w_lower;
  run.constants["w_upper"] = p.w_upper;
  run.constants["nu"] = nu;
  run.constants["nu_scope"] = "sampled at the window start";
  run.constants["V_cap"] = p.V_cap;
  run.constants["bound_V"] = bound;
  run.constants["alpha_sampled"] = number(estimate_alpha(p, f, sampler, w.centre()));
}

// --------------------------------------------------------------- quasilinear

// Shared tail of the quasilinear and boundary value pipelines.
void quasilinear_tail(Run& run, const QuasilinearSystem& sys, const Window& w,
                      const std::vector<double>& grid) {
  const RunConfig& c = run.cfg;
  const double cc = sys.c, d = sys.d(), m = sys.m();
  const double r0 = 1.05 * cc / d;
  const QuasilinearVW q = build_quasilinear_vw(sys, sys.C, r0, grid);
  const VectorField f = sys.field();
  const double spread = q.lambda_plus_sup - q.lambda_minus_inf;
  const double rs = r_star(cc, d, m, spread);

  const double box = 3.0 * std::max(1.0, r0);
  const RegionSampler sampler =
      RegionSampler::fixed_box(Vec::Constant(sys.n, -box), Vec::Constant(sys.n, box), 20000, c.seed);
  run.condition(check_condition_A(q.pair, f, sampler, w.t0, w.t1));

  const double bound = v_bound(q.pair, q.omega0, q.omega_sup);
  ShootingConfig sc = base_shooting(c, 1e-6);
  sc.anchor_time = w.centre();
  const ShootingCertificate cert = extract_limit_solution(
      f, q.pair, q.family, start_sequence(c, w), w.half(), sc, {q.omega0, q.omega_sup, bound});
  run.shooting(cert);

  double wt = w.t0;
  const double sup = sup_norm(cert.trajectory, 4001, &wt);
  run.lines.push_back(bound_line("sup_norm", sup, rs, wt));
  run.condition(trajectory_check(q.pair, cert.trajectory));

  const UniquenessProblem up = quasilinear_uniqueness(sys, rs * rs);
  const RegionSampler pairs = RegionSampler::fixed_box(Vec::Constant(2 * sys.n, -rs),
                                                       Vec::Constant(2 * sys.n, rs), 4000, c.seed + 1);
  run.condition(uniqueness_certificate(up, f, w.t0, w.t1, pairs));

  run.constants["a"] = sys.a;
  run.constants["k"] = sys.k;
  run.constants["l"] = sys.l;
  run.constants["c"] = cc;
  run.constants["sigma"] = sys.sigma;
  run.constants["d"] = d;
  run.constants["m"] = m;
  run.constants["r0"] = r0;
  run.constants["spread"] = spread;
  run.constants["spread_scope"] = "window grid";
  run.constants["r_star"] = rs;
  run.constants["r_quad"] = r_quad(cc, d, m, spread);
  run.constants["alpha_lower"] = q.alpha_lower;
  run.constants["omega0"] = q.omega0;
  run.constants["omega_sup"] = q.omega_sup;
  run.constants["nu"] = q.nu;
  run.constants["nu_scope"] = "sampled at the window start";
  run.constants["V_cap"] = q.pair.V_cap;
  run.constants["bound_V"] = bound;
}

void hypotheses(Run& run, const QuasilinearSystem& sys, const std::vector<double>& grid) {
  HypothesisOptions ho;
  ho.grid = grid;
  ho.sampler = RegionSampler::fixed_box(Vec::Constant(sys.n, -2.0), Vec::Constant(sys.n, 2.0), 2000,
                                        run.cfg.seed + 2);
  const ConditionReport rep = check_quasilinear_hypotheses(sys, ho);
  run.condition(rep);
  if (rep.status == Status::Fail)
    throw Error(ErrorCode::HypothesisViolated, rep.notes.empty() ? "hypotheses fail" : rep.notes.front());
}

void saddle_2d(Run& run) {
  const RunConfig& c = run.cfg;
  allow(c, {"eps", "t_step"}, {"C"});
  const Window w = window_of(c, -20.0, 20.0);
  const std::vector<double> grid = linspace(w.t0, w.t1, 81);
  const double eps = param(c, "eps", 0.1);
  if (!(eps >= 0.0)) config_error("eps must be nonnegative");

  QuasilinearSystem s;
  s.n = 2;
  s.A = [](double) {
    Mat A = Mat::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = -1.0;
    return A;
  };
  const double r2 = std::sqrt(2.0);
  s.g = [eps, r2](double t, const Vec& x) {
    Vec g(2);
    g << eps * (std::sin(x[1]) + std::sin(t)), eps * (std::cos(x[0]) + std::cos(r2 * t));
    return g;
  };
  s.a = 1.0;
  s.k = eps;
  s.l = 0.0;
  if (c.tables.count("C")) {
    s.C = SymmetricFormPath::from_csv(c.tables.at("C"));
    s.c = 0.0;
    s.sigma = kInf;
    for (double t : grid) {
      const Mat Ct = s.C(t);
      s.c = std::max(s.c, Eigen::SelfAdjointEigenSolver<Mat>(Ct).eigenvalues().cwiseAbs().maxCoeff());
      s.sigma = std::min(s.sigma, std::abs(Ct.determinant()));
    }
  } else {
    Mat C = Mat::Zero(2, 2);
    C(0, 0) = 0.5;
    C(1, 1) = -0.5;
    s.C = SymmetricFormPath::constant(C);
    s.c = 0.5;
    s.sigma = 0.25;
  }
  hypotheses(run, s, grid);
  quasilinear_tail(run, s, w, grid);
  run.constants["eps"] = eps;
}

void bvp_example(Run& run) {
  const RunConfig& c = run.cfg;
  allow(c, {"ell", "amplitude", "t_step"}, {});
  const Window w = window_of(c, -20.0, 20.0);
  const std::vector<double> grid = linspace(w.t0, w.t1, 81);
  const double ell = param(c, "ell", 0.1);
  const double amp = param(c, "amplitude", 0.1);

  BvpInputs in;
  in.rho = [](double) { return 1.0; };
  in.omega = [](double) { return 1.0; };
  in.Z = [ell, amp](double t, double z, double) { return amp * std::sin(t) + ell * z; };
  in.ell = ell;
  in.grid = grid;
  const QuasilinearSystem s = build_bvp_system(in);
  hypotheses(run, s, grid);
  quasilinear_tail(run, s, w, grid);
  run.constants["delta"] = s.delta;
  run.constants["ell"] = ell;
  run.constants["amplitude"] = amp;
}

// -------------------------------------------------------------------- pencil

void pencil_cubic(Run& run) {
  const RunConfig& c = run.cfg;
  allow(c, {"eps", "v0", "t_step"}, {"S", "B"});
  const Window w = window_of(c, -20.0, 20.0);
  const double eps = param(c, "eps", 0.1);
  const double v0 = param(c, "v0", 0.5);
  if (!(eps >= 0.0)) config_error("eps must be nonnegative");

  PencilData pd;
  Mat S = Mat::Zero(2, 2);
  S(0, 0) = 1.0;
  S(1, 1) = -1.0;
  pd.S = c.tables.count("S") ? SymmetricFormPath::from_csv(c.tables.at("S"))
                             : SymmetricFormPath::constant(S);
  pd.B = c.tables.count("B") ? SymmetricFormPath::from_csv(c.tables.at("B"))
                             : SymmetricFormPath::constant(Mat::Identity(2, 2));
  // <S f, x> = v + v^2 + eps (x1 sin t - x2 cos t), |<B f, x>| <= v + v^2 + eps sqrt(v).
  pd.gamma = [](double) { return 1.0; };
  pd.Gamma = [eps](double v) { return v + v * v - eps * std::sqrt(v); };
  pd.Delta = [eps](double v) { return v + v * v + eps * std::sqrt(v); };
  pd.v0 = v0;
  if (!c.tables.count("S") && !c.tables.count("B")) {
    pd.xi = 0.0;
    pd.varsigma = 0.0;
  }
  const std::vector<double> grid = linspace(w.t0, w.t1, 81);
  const PencilBound pb = pencil_bound(pd, grid);

  VectorField f;
  f.dim = 2;
  f.f = [eps](double t, const Vec& x) {
    const double v = x.squaredNorm();
    Vec d(2);
    d << x[0] * (1.0 + v) + eps * std::sin(t), -x[1] * (1.0 + v) - eps * std::cos(t);
    return d;
  };

  const RegionSampler sampler =
      RegionSampler::fixed_box(Vec::Constant(2, -3.0), Vec::Constant(2, 3.0), 20000, c.seed);
  run.condition(check_condition_A(pb.pair, f, sampler, w.t0, w.t1));

  const double bound = v_bound(pb.pair, pb.omega0, pb.omega_sup);
  ShootingConfig sc = base_shooting(c, 1e-6);
  sc.anchor_time = w.centre();
  const ShootingCertificate cert = extract_limit_solution(
      f, pb.pair, pb.family, start_sequence(c, w), w.half(), sc, {pb.omega0, pb.omega_sup, bound});
  run.shooting(cert);

  double sup = 0.0, wt = w.t0;
  for (double t : linspace(cert.trajectory.t_begin(), cert.trajectory.t_end(), 4001)) {
    const Vec x = cert.trajectory.evaluate(t);
    const double v = x.dot(pd.B(t) * x);
    if (v > sup) {
      sup = v;
      wt = t;
    }
  }
  run.lines.push_back(bound_line("sup_B_form", sup, pb.v_star, wt));
  run.condition(trajectory_check(pb.pair, cert.trajectory));

  run.constants["eps"] = eps;
  run.constants["v0"] = v0;
  run.constants["v_star"] = pb.v_star;
  run.constants["spread"] = pb.spread;
  run.constants["spread_scope"] = "window grid";
  run.constants["xi"] = pb.xi;
  run.constants["varsigma"] = pb.varsigma;
  run.constants["omega0"] = pb.omega0;
  run.constants["omega_sup"] = pb.omega_sup;
  run.constants["V_cap"] = pb.pair.V_cap;
  run.constants["bound_V"] = bound;
}

// ---------------------------------------------------------------- lagrangian

void duffing_repeller(Run& run) {
  const RunConfig& c = run.cfg;
  allow(c, {"t_step"}, {});
  const Window w = window_of(c, -20.0, 20.0);

  // L = q'^2/2 + q^2 + q^4 + q sin t, Psi = q^2 + q^4.
  LagrangianSystem L;
  L.m = 1;
  L.A = [](double, const Vec&) { return Mat::Identity(1, 1); };
  L.A_t = [](double, const Vec&) { return Mat::Zero(1, 1); };
  L.A_q = [](double, const Vec&) { return std::vector<Mat>{Mat::Zero(1, 1)}; };
  L.Phi = [](double t, const Vec& q) {
    const double s = q[0] * q[0];
    return s + s * s + q[0] * std::sin(t);
  };
  L.Phi_q = [](double t, const Vec& q) {
    return Vec::Constant(1, 2.0 * q[0] + 4.0 * q[0] * q[0] * q[0] + std::sin(t));
  };
  L.Phi_t = [](double t, const Vec& q) { return q[0] * std::cos(t); };
  L.Phi_qq = [](double, const Vec& q) { return Mat::Constant(1, 1, 2.0 + 12.0 * q[0] * q[0]); };
  L.Psi = [](double, const Vec& q) {
    const double s = q[0] * q[0];
    return s + s * s;
  };
  L.Psi_q = [](double, const Vec& q) { return Vec::Constant(1, 2.0 * q[0] + 4.0 * q[0] * q[0] * q[0]); };
  L.Psi_t = [](double, const Vec&) { return 0.0; };

  LagrangianConstants lc;
  lc.kappa = 1.0;
  lc.theta = 0.5;
  // Phi_q q >= Psi once Psi >= 1; Phi_q q >= -1/8 below; |d(Phi + Psi)/dq| <= 6 Psi + 3.
  lc.R = R_from_constants(1.0, 1.0, 0.125, 0.0, 0.0);
  lc.K = K_from_constants(0.5, 0.0, 0.0, 6.0, 3.0, 0.0, 0.0, lc.R);
  lc.Theta_upper = [](double s) { return s; };
  lc.Theta_lower = [](double s) { return 0.5 * (std::sqrt(1.0 + 4.0 * s) - 1.0); };
  const double wb = closed_omega_bound(lc.Theta_upper, {}, lc.R);
  lc.omega0 = -wb;
  lc.omega_sup = wb;

  const RegionSampler sampler =
      RegionSampler::fixed_box((Vec(2) << -3.0, -6.0).finished(), (Vec(2) << 3.0, 6.0).finished(),
                               20000, c.seed);
  run.condition(check_quasiconvexity(L, lc.kappa, lc.R, sampler, w.t0, w.t1));

  TildeWOptions to;
  to.seed = c.seed + 4;
  to.Theta_upper = lc.Theta_upper;
  const TildeW tw = tilde_w_bounds(L, lc.R, w.centre(), to);
  run.lines.push_back(bound_line("tilde_w_sup", tw.w_sup, tw.closed_upper));
  run.lines.push_back(bound_line("tilde_w_inf", -tw.w0, -tw.closed_lower));

  const LagrangianVW vw = build_lagrangian_vw(L, lc, w.t0);
  const VectorField f = el_field(L);
  run.condition(check_condition_A(vw.pair, f, sampler, w.t0, w.t1));

  const EnergyBound eb = energy_bound(lc, lc.omega0, lc.omega_sup, tw.w_sup, tw.w0);
  const double bound = V_bar(eb.global, lc.theta, lc.R);
  ShootingConfig sc = base_shooting(c, 1e-6);
  sc.anchor_time = w.centre();
  ShootingCertificate cert = extract_limit_solution(
      f, vw.pair, vw.family, start_sequence(c, w, 4.0), w.half(), sc, {lc.omega0, lc.omega_sup, bound});
  run.shooting(cert);

  double supE = 0.0, wt = w.t0;
  for (double t : linspace(cert.trajectory.t_begin(), cert.trajectory.t_end(), 4001)) {
    const Vec x = cert.trajectory.evaluate(t);
    const double E = L.energy(t, x.head(1), x.tail(1));
    if (E > supE) {
      supE = E;
      wt = t;
    }
  }
  run.lines.push_back(bound_line("energy", supE, eb.global, wt));

  const HamiltonianSystem H(L);
  const double pmax = std::sqrt(2.0 * eb.global) + 1.0;
  const double qmax = std::sqrt(std::sqrt(eb.global)) + 0.2;
  const RegionSampler zs = RegionSampler::fixed_box(
      (Vec(2) << -qmax, -pmax).finished(), (Vec(2) << qmax, pmax).finished(), 4000, c.seed + 3);
  const ConvexityCertificate cv = convexity_certificate(H, eb.global, 1.0, zs, w.t0, w.t1);
  run.report["convexity"] = to_json(cv);
  ReportLine cl;
  cl.name = "convexity";
  cl.status = cv.status;
  cl.measured = cv.rho_hat;
  cl.bound = 0.0;
  cl.margin = cv.rho_hat;
  if (cv.status == Status::Fail) cl.witness_t = cv.witness_t;
  run.lines.push_back(cl);

  run.constants["kappa"] = lc.kappa;
  run.constants["theta"] = lc.theta;
  run.constants["R"] = lc.R;
  run.constants["K"] = lc.K;
  run.constants["omega_bound"] = wb;
  run.constants["tilde_w0"] = tw.w0;
  run.constants["tilde_w_sup"] = tw.w_sup;
  run.constants["energy_bound"] = eb.global;
  run.constants["energy_bound_local"] = eb.local;
  run.constants["alpha_lower"] = vw.alpha_lower;
  run.constants["nu"] = vw.nu;
  run.constants["nu_scope"] = "sampled at the window start";
  run.constants["bound_V"] = bound;
}

// ------------------------------------------------------------------ helicoid

void example_helicoid(Run& run) {
  const RunConfig& c = run.cfg;
  allow(c, {"k", "ap_epsilon", "ap_max_gap", "tau_max", "ap_relative"}, {});
  HelicoidConfig hc = HelicoidConfig::default_instance();
  hc.k = param(c, "k", hc.k);
  hc.ap_epsilon = param(c, "ap_epsilon", hc.ap_epsilon);
  hc.tau_max = param(c, "tau_max", hc.tau_max);
  const double max_gap = param(c, "ap_max_gap", 10.0);
  const double ap_relative = param(c, "ap_relative", 0.05);
  if (c.t0) hc.t0 = *c.t0;
  if (c.t1) hc.t1 = *c.t1;
  apply_tolerances(c, hc.shooting);
  hc.validate();

  const HelicoidRun hr = run_helicoid(hc);
  const HelicoidConstants& k = hr.constants;
  {
    ReportLine l = bound_line("kappa", std::abs(k.kappa - 1.0), 1e-15);
    l.status = std::abs(k.kappa - 1.0) <= 1e-15 ? Status::Pass : Status::Fail;
    run.lines.push_back(l);
  }
  run.lines.push_back(bound_line("energy_chain", k.r, k.C_k29));
  run.lines.push_back(bound_line("K_rounded", k.K, k.K_rounded));

  const LagrangianSystem L = build_helicoid(hc);
  const LagrangianVW vw = build_lagrangian_vw(L, k.constants, hc.t0);
  const VectorField f = helicoid_field(hc);
  const Vec lo = (Vec(4) << -0.5, -0.5, -2.0, -2.0).finished();
  const RegionSampler sampler = RegionSampler::fixed_box(lo, -lo, 40000, c.seed);
  run.condition(check_condition_A(vw.pair, f, sampler, hc.t0, hc.t1));
  run.condition(check_quasiconvexity(L, k.kappa, k.R, sampler, hc.t0, hc.t1));

  const HamiltonianSystem H(L);
  const RegionSampler zs = RegionSampler::fixed_box((Vec(4) << -0.6, -0.6, -6.0, -9.0).finished(),
                                                    (Vec(4) << 0.6, 0.6, 6.0, 9.0).finished(), 4000,
                                                    c.seed + 3);
  QuadraticTestOptions qt;
  qt.alpha2 = helicoid_alpha2(hc);
  const ConvexityCertificate cv = convexity_certificate(H, k.r, 1.0, zs, hc.t0, hc.t1, qt);
  run.report["convexity"] = to_json(cv);
  ReportLine cl;
  cl.name = "convexity";
  cl.status = cv.status;
  cl.measured = cv.quadratic_test_worst;
  cl.bound = 0.0;
  cl.margin = -cv.quadratic_test_worst;
  if (cv.status == Status::Fail) cl.witness_t = cv.witness_t;
  run.lines.push_back(cl);

  run.shooting(hr.certificate);

  ReportLine ap;
  ap.name = "almost_period_gap";
  ap.measured = hr.ap.max_gap;
  ap.bound = max_gap;
  ap.margin = max_gap - hr.ap.max_gap;
  ap.status = !hr.ap.accepted.empty() && hr.ap.max_gap <= max_gap ? Status::Pass : Status::Fail;
  run.lines.push_back(ap);
  Json apj = to_json(hr.ap);
  apj["label"] = hr.ap_label;
  // Every shift has defect at most 2 sup|x|, so an epsilon at that level accepts
  // everything. The relative scan reuses the defect profile at a fraction of the
  // amplitude and reports how far its accepted shifts sit from multiples of 2 pi.
  apj["trivial_epsilon"] = number(2.0 * hr.sup_state_norm);
  {
    const double eps = ap_relative * hr.sup_state_norm;
    std::vector<double> acc;
    double far = 0.0;
    for (std::size_t i = 0; i < hr.ap.tau.size(); ++i) {
      if (!(hr.ap.defect[i] <= eps) || hr.ap.tau[i] <= 0.0) continue;
      acc.push_back(hr.ap.tau[i]);
      const double m = std::round(hr.ap.tau[i] / (2.0 * std::numbers::pi));
      far = std::max(far, std::abs(hr.ap.tau[i] - 2.0 * std::numbers::pi * m));
    }
    Json rel;
    rel["fraction"] = ap_relative;
    rel["epsilon"] = number(eps);
    rel["accepted_count"] = acc.size();
    rel["max_distance_to_2pi_multiple"] = acc.empty() ? Json() : number(far);
    rel["accepted"] = acc;
    apj["relative"] = rel;
  }
  run.report["almost_periods"] = apj;

  run.constants["k"] = k.k;
  run.constants["chi_star"] = k.etas.chi_star;
  run.constants["eta1"] = k.etas.eta1;
  run.constants["eta2"] = k.etas.eta2;
  run.constants["eta3"] = k.etas.eta3;
  run.constants["R"] = k.R;
  run.constants["kappa"] = k.kappa;
  run.constants["theta"] = k.theta;
  run.constants["K"] = k.K;
  run.constants["K_rounded"] = k.K_rounded;
  run.constants["r"] = k.r;
  run.constants["C"] = k.C;
  run.constants["C_recomputed"] = k.C_recomputed;
  run.constants["C_k29"] = k.C_k29;
  run.constants["chain_holds"] = k.chain_holds;
  run.constants["q_norm_sq_bound"] = k.q_norm_sq_bound;
  run.constants["W_bound"] = k.W_bound;
  run.constants["W_bound_closed"] = k.W_bound_closed;
  run.constants["ap_threshold"] = k.ap_threshold;
  run.constants["ap_guaranteed"] = k.ap_guaranteed;
  run.constants["sup_energy"] = hr.sup_energy;
  run.constants["sup_q_norm_sq"] = hr.sup_q_norm_sq;
  run.constants["sup_abs_W"] = hr.sup_abs_W;
  run.constants["sup_state_norm"] = hr.sup_state_norm;
}

const ExampleInfo& find_example(const std::string& name) {
  for (const ExampleInfo& e : kExamples)
    if (e.name == name) return e;
  config_error("unknown system '" + name + "'");
}

Status overall(const std::vector<ReportLine>& lines) {
  Status s = Status::Pass;
  for (const ReportLine& l : lines) {
    if (l.status == Status::Fail) return Status::Fail;
    if (l.status == Status::Inconclusive) s = Status::Inconclusive;
  }
  return s;
}

bool inconclusive_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::EmptyRegion:
    case ErrorCode::AnchorsNotCauchy:
    case ErrorCode::LevelSetNotFound:
    case ErrorCode::WindowTooShort:
    case ErrorCode::NoInteriorCandidate:
    case ErrorCode::SpanTooShort:
      return true;
    default:
      return false;
  }
}

Json header(const RunConfig& c) {
  Json r;
  r["schema_version"] = kReportSchemaVersion;
  r["pipeline"] = c.pipeline;
  r["system"] = c.system;
  r["seed"] = c.seed;
  r["config"] = c.to_json();
  // where the files land is a property of the run, not of the result
  r["config"].erase("output");
  return r;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json meta(double seconds, const std::string& output) {
  Json m;
  m["output"] = output;
  m["generated_at"] = utc_now();
  m["runtime_s"] = seconds;
  m["kernels"] = kernels::active_name();
  m["version"] = kVersion;
  return m;
}

}  // namespace

const std::vector<ExampleInfo>& examples() { return kExamples; }

RunConfig example_config(const std::string& name) {
  const ExampleInfo& e = find_example(name);
  RunConfig c;
  c.pipeline = e.pipeline;
  c.system = e.name;
  c.output = "vw-out/" + e.name;
  return c;
}

PipelineResult run_pipeline(const RunConfig& cfg) {
  if (cfg.system.empty()) config_error("missing 'system'");
  const ExampleInfo& e = find_example(cfg.system);
  if (e.pipeline != cfg.pipeline)
    config_error("system " + cfg.system + " belongs to pipeline " + e.pipeline);
  for (const auto& [k, path] : cfg.tables)
    if (!std::filesystem::is_regular_file(path)) config_error("table file not found: " + path);

  Run run{cfg};
  run.report = header(cfg);
  if (e.name == "scalar-saddle") scalar_saddle(run);
  else if (e.name == "saddle-2d") saddle_2d(run);
  else if (e.name == "bvp-example") bvp_example(run);
  else if (e.name == "pencil-cubic") pencil_cubic(run);
  else if (e.name == "duffing-repeller") duffing_repeller(run);
  else example_helicoid(run);

  PipelineResult out;
  out.status = overall(run.lines);
  run.report["status"] = to_string(out.status);
  Json lines = Json::array();
  for (const ReportLine& l : run.lines) lines.push_back(to_json(l));
  run.report["certificates"] = lines;
  run.report["conditions"] = run.conditions;
  run.report["constants"] = run.constants;
  out.report = std::move(run.report);
  out.constants = Json::object();
  out.constants["schema_version"] = kReportSchemaVersion;
  out.constants["system"] = cfg.system;
  out.constants["seed"] = cfg.seed;
  out.constants["constants"] = run.constants;
  out.trajectory = std::move(run.trajectory);
  return out;
}

int exit_code(Status s) {
  switch (s) {
    case Status::Pass: return 0;
    case Status::Fail: return 1;
    case Status::Inconclusive: return 2;
  }
  return 3;
}

RunOutcome run(const RunConfig& cfg) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  const std::filesystem::path dir(cfg.output);
  try {
    PipelineResult res = run_pipeline(cfg);
    res.report["meta"] = meta(elapsed(), cfg.output);
    write_atomic((dir / "report.json").string(), res.report.dump(2) + "\n");
    out.written.push_back((dir / "report.json").string());
    if (res.trajectory) {
      std::ostringstream os;
      res.trajectory->write_csv(os);
      write_atomic((dir / kTrajectoryFile).string(), os.str());
      out.written.push_back((dir / kTrajectoryFile).string());
    }
    write_atomic((dir / "constants.json").string(), res.constants.dump(2) + "\n");
    out.written.push_back((dir / "constants.json").string());
    out.exit_code = exit_code(res.status);
    out.message = std::string("status ") + to_string(res.status);
    out.report = std::move(res.report);
  } catch (const Error& e) {
    if (!inconclusive_code(e.code())) {
      out.exit_code = 3;
      out.message = e.what();
      return out;
    }
    Json r = header(cfg);
    r["status"] = to_string(Status::Inconclusive);
    r["certificates"] = Json::array();
    r["error"] = {{"code", to_string(e.code())}, {"message", e.what()}};
    if (e.time()) r["error"]["witness_t"] = *e.time();
    r["meta"] = meta(elapsed(), cfg.output);
    try {
      write_atomic((dir / "report.json").string(), r.dump(2) + "\n");
      out.written.push_back((dir / "report.json").string());
    } catch (const std::exception& w) {
      out.exit_code = 3;
      out.message = w.what();
      return out;
    }
    out.exit_code = 2;
    out.message = e.what();
    out.report = std::move(r);
  } catch (const std::exception& e) {
    out.exit_code = 3;
    out.message = e.what();
  }
  return out;
}

}  // namespace vw
