#include "vw/fields.hpp"
#include "vw/quadform.hpp"

#include <doctest.h>

#include <cmath>

using namespace vw;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

VectorField linear(const Mat& A) {
  VectorField f;
  f.dim = static_cast<int>(A.rows());
  f.f = [A](double, const Vec& x) -> Vec { return A * x; };
  return f;
}

VectorField forced_saddle() {
  VectorField f;
  f.dim = 1;
  f.f = [](double t, const Vec& x) { return Vec::Constant(1, x[0] + std::sin(t)); };
  return f;
}

ScalarField norm_sq(double shift) {
  ScalarField s;
  s.value = [shift](double, const Vec& x) { return x.squaredNorm() - shift; };
  s.grad = [](double, const Vec& x) -> Vec { return 2.0 * x; };
  s.dt = [](double, const Vec&) { return 0.0; };
  return s;
}

VWPair saddle_pair(double r0, double w_upper) {
  VWPair p;
  p.V = norm_sq(r0 * r0);
  p.W = norm_sq(0.0);
  p.c_lower = kInf;
  p.c_upper = 1.0;
  p.w_lower = -0.1;
  p.w_upper = w_upper;
  return p;
}

}  // namespace

TEST_CASE("lie derivative examples") {
  ScalarField time_only;
  time_only.value = [](double t, const Vec&) { return t; };
  CHECK(lie_derivative(time_only, linear(Mat::Identity(2, 2)), 0.3, v2(1, 2)) ==
        doctest::Approx(1.0).epsilon(1e-8));

  const Vec x = v2(0.7, -1.3);
  CHECK(lie_derivative(norm_sq(0.0), linear(Mat::Identity(2, 2)), 0.0, x) ==
        doctest::Approx(2.0 * x.squaredNorm()));

  ScalarField prod;
  prod.value = [](double, const Vec& y) { return y[0] * y[1]; };
  Mat swap(2, 2);
  swap << 0, 1, 1, 0;
  CHECK(lie_derivative(prod, linear(swap), 0.0, v2(1, 2)) == doctest::Approx(5.0).epsilon(1e-8));
  CHECK(lie_derivative_fd(prod, linear(swap), 0.0, v2(1, 2)) == doctest::Approx(5.0).epsilon(1e-8));
}

TEST_CASE("lie derivative rejects non-finite values") {
  ScalarField bad;
  bad.value = [](double, const Vec&) { return std::nan(""); };
  bad.grad = [](double, const Vec& x) -> Vec { return Vec::Constant(x.size(), std::nan("")); };
  bad.dt = [](double, const Vec&) { return 0.0; };
  try {
    lie_derivative(bad, linear(Mat::Identity(1, 1)), 0.0, Vec::Ones(1));
    FAIL("expected NonFiniteValue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteValue);
  }
}

TEST_CASE("condition A on the quasilinear pair of the boundary value instance") {
  BvpInputs in;
  in.rho = [](double) { return 1.0; };
  in.omega = [](double) { return 1.0; };
  in.Z = [](double t, double z, double) { return 0.1 * std::sin(t) + 0.1 * z; };
  in.ell = 0.1;
  in.grid = {-5.0, 0.0, 5.0};
  const QuasilinearSystem sys = build_bvp_system(in);
  const double r0 = 1.05 * sys.c / sys.d();
  const QuasilinearVW q = build_quasilinear_vw(sys, sys.C, r0, in.grid);
  const auto sampler = RegionSampler::fixed_box(Vec::Constant(2, -3), Vec::Constant(2, 3), 8000, 3);
  const ConditionReport rep = check_condition_A(q.pair, sys.field(), sampler, -5.0, 5.0);
  CHECK(rep.status == Status::Pass);
  CHECK(rep.samples > 0);
  CHECK(rep.constants.at("c_upper_measured") <= 1.0 + 1e-9);
}

TEST_CASE("condition A fails with a witness when W decreases") {
  VWPair p;
  p.V = norm_sq(1.0);
  p.W.value = [](double, const Vec& x) { return -x.squaredNorm(); };
  p.W.grad = [](double, const Vec& x) -> Vec { return -2.0 * x; };
  p.c_upper = 1.0;
  p.w_lower = -10.0;
  p.w_upper = 10.0;
  const auto sampler = RegionSampler::fixed_box(Vec::Constant(2, -2), Vec::Constant(2, 2), 500, 1);
  const ConditionReport rep = check_condition_A(p, linear(Mat::Identity(2, 2)), sampler, 0.0, 1.0);
  CHECK(rep.status == Status::Fail);
  REQUIRE(rep.witness_t);
  REQUIRE(rep.witness_x.size() == 2);
  CHECK(rep.witness_x.squaredNorm() >= 1.0);
}

TEST_CASE("condition A reports an empty region distinctly") {
  VWPair p = saddle_pair(10.0, 1000.0);
  const auto sampler = RegionSampler::fixed_box(Vec::Constant(2, -1), Vec::Constant(2, 1), 200, 1);
  try {
    check_condition_A(p, linear(Mat::Identity(2, 2)), sampler, 0.0, 1.0);
    FAIL("expected EmptyRegion");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyRegion);
  }
}

TEST_CASE("estimate_alpha on the forced scalar saddle") {
  VWPair p = saddle_pair(1.0, 4.0);
  const auto sampler = RegionSampler::fixed_box(Vec::Constant(1, -2), Vec::Constant(1, 2), 4001, 1,
                                                SamplingStrategy::Grid);
  // 2x^2 + 2x sin t on 1 < |x| < 2
  const double a0 = estimate_alpha(p, forced_saddle(), sampler, 0.0);
  CHECK(a0 >= 2.0);
  CHECK(a0 < 2.01);
  const double a1 = estimate_alpha(p, forced_saddle(), sampler, M_PI / 2);
  CHECK(a1 >= 0.0);
  CHECK(a1 < 0.01);

  VectorField c;
  c.dim = 1;
  c.f = [](double, const Vec&) { return Vec::Constant(1, 1.5); };
  ScalarField lin;
  lin.value = [](double, const Vec& x) { return x[0]; };
  lin.grad = [](double, const Vec&) { return Vec::Ones(1); };
  VWPair q = p;
  q.W = lin;
  q.w_lower = -10.0;
  q.w_upper = 10.0;
  CHECK(estimate_alpha(q, c, sampler, 0.0) == doctest::Approx(1.5));
}

TEST_CASE("level set extrema") {
  VWPair p;
  p.V = norm_sq(1.0);
  p.W.value = [](double, const Vec& x) { return x[0] * x[1]; };
  p.W.grad = [](double, const Vec& x) { return v2(x[1], x[0]); };
  p.w_lower = -5.0;
  p.w_upper = 5.0;
  LevelSetOptions opt;
  opt.lo = Vec::Constant(2, -2.0);
  opt.hi = Vec::Constant(2, 2.0);
  const LevelExtrema e = level_extrema(p, 0.0, opt);
  CHECK(e.w0 == doctest::Approx(-0.5).epsilon(1e-7));
  CHECK(e.w_sup == doctest::Approx(0.5).epsilon(1e-7));
  CHECK(e.consistent);

  VWPair r = p;
  r.W = norm_sq(0.0);
  const LevelExtrema f = level_extrema(r, 0.0, opt);
  CHECK(f.w0 == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(f.w_sup == doctest::Approx(1.0).epsilon(1e-7));

  VWPair none = p;
  none.V = norm_sq(-1.0);
  try {
    level_extrema(none, 0.0, opt);
    FAIL("expected LevelSetNotFound");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::LevelSetNotFound);
  }
}

TEST_CASE("horizon quantities with constant rate") {
  std::vector<double> t, a, w0, ws;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.1 * i);
    a.push_back(2.0);
    w0.push_back(-1.0);
    ws.push_back(1.0);
  }
  const Horizon h = horizon_from_grid(t, a, w0, ws);
  CHECK(h.omega0 == -1.0);
  CHECK(h.omega_sup == 1.0);
  CHECK(h.tau_plus(5.0) == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(h.tau_minus(5.0) == doctest::Approx(4.0).epsilon(1e-12));
  try {
    h.tau_plus(19.5);
    FAIL("expected WindowTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WindowTooShort);
  }
}

TEST_CASE("V bound from the window spread") {
  CHECK(v_bound(1.0, 1.0, 0.0, 2.0) == doctest::Approx(1.0));
  CHECK(v_bound(kInf, 1.0, 0.0, 2.0) == doctest::Approx(2.0));
  CHECK(v_bound(3.0, 6.0, -1.0, 1.0) == doctest::Approx(4.0));
}

TEST_CASE("V estimates along trajectories") {
  SUBCASE("vacuous when V stays negative") {
    std::vector<double> ts;
    std::vector<Vec> xs, ds;
    for (int i = 0; i <= 400; ++i) {
      const double t = -20.0 + 0.1 * i;
      ts.push_back(t);
      xs.push_back(Vec::Constant(1, -0.5 * (std::sin(t) + std::cos(t))));
      ds.push_back(Vec::Constant(1, -0.5 * (std::cos(t) - std::sin(t))));
    }
    const Trajectory tr = Trajectory::from_nodes(ts, xs, ds);
    const ConditionReport rep = trajectory_check(saddle_pair(1.5, 9.0), tr);
    CHECK(rep.status == Status::Pass);
  }
  SUBCASE("escaping trajectory up to the exit") {
    IntegratorConfig cfg;
    cfg.rtol = 1e-11;
    const Trajectory tr = integrate(forced_saddle(), 0.0, Vec::Zero(1), 1.85, cfg).trajectory;
    TrajectoryCheckOptions opt;
    opt.alpha = [](double) { return 1.5; };  // 2x^2 + 2x sin t >= 4.5 - 3 on |x| >= 1.5
    const ConditionReport rep = trajectory_check(saddle_pair(1.5, 9.0), tr, opt);
    CHECK(rep.status == Status::Pass);
    CHECK(rep.constants.at("positive_runs") >= 1.0);
  }
  SUBCASE("leaving the window throws") {
    const Trajectory tr = integrate(forced_saddle(), 0.0, Vec::Zero(1), 3.0, {}).trajectory;
    try {
      trajectory_check(saddle_pair(1.5, 9.0), tr);
      FAIL("expected TrajectoryLeftW");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TrajectoryLeftW);
    }
  }
}

TEST_CASE("uniqueness certificate") {
  VectorField f;
  f.dim = 1;
  f.f = [](double, const Vec& x) { return x; };
  UniquenessProblem p;
  p.U.value = [](double, const Vec& x, const Vec& y) { return (x - y).squaredNorm(); };
  p.U.grad_x = [](double, const Vec& x, const Vec& y) -> Vec { return 2.0 * (x - y); };
  p.U.grad_y = [](double, const Vec& x, const Vec& y) -> Vec { return -2.0 * (x - y); };
  p.U.dt = [](double, const Vec&, const Vec&) { return 0.0; };
  p.V = norm_sq(0.0);
  p.eta = [](double u) { return u; };
  p.beta = [](double, double) { return 2.0; };
  p.r = 1.0;
  const auto sampler = RegionSampler::fixed_box(Vec::Constant(2, -1), Vec::Constant(2, 1), 500, 2);

  SUBCASE("equality boundary passes with zero margin") {
    const ConditionReport rep = uniqueness_certificate(p, f, -5.0, 5.0, sampler);
    CHECK(rep.status == Status::Pass);
    CHECK(std::abs(rep.constants.at("condition2_margin")) < 1e-9);
  }
  SUBCASE("zero beta fails condition 3") {
    p.beta = [](double, double) { return 0.0; };
    const ConditionReport rep = uniqueness_certificate(p, f, -5.0, 5.0, sampler);
    CHECK(rep.status == Status::Fail);
  }
  SUBCASE("empty region") {
    p.r = -1.0;
    try {
      uniqueness_certificate(p, f, -5.0, 5.0, sampler);
      FAIL("expected EmptyRegion");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::EmptyRegion);
    }
  }
}

TEST_CASE("samplers are deterministic per seed") {
  const auto a = RegionSampler::fixed_box(Vec::Constant(3, -1), Vec::Constant(3, 1), 50, 9);
  const auto b = RegionSampler::fixed_box(Vec::Constant(3, -1), Vec::Constant(3, 1), 50, 9);
  const auto c = RegionSampler::fixed_box(Vec::Constant(3, -1), Vec::Constant(3, 1), 50, 10);
  const auto sa = a.samples(0.0), sb = b.samples(0.0), sc = c.samples(0.0);
  REQUIRE(sa.size() == 50);
  double diff = 0.0, other = 0.0;
  for (std::size_t i = 0; i < sa.size(); ++i) {
    diff += (sa[i] - sb[i]).norm();
    other += (sa[i] - sc[i]).norm();
    CHECK(sa[i].cwiseAbs().maxCoeff() <= 1.0);
  }
  CHECK(diff == 0.0);
  CHECK(other > 0.0);
}
