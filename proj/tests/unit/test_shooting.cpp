#include "vw/shooting.hpp"

#include <doctest.h>

#include <cmath>

using namespace vw;

namespace {

VectorField forced_saddle() {
  VectorField f;
  f.dim = 1;
  f.f = [](double t, const Vec& x) { return Vec::Constant(1, x[0] + std::sin(t)); };
  return f;
}

double exact(double t) { return -0.5 * (std::sin(t) + std::cos(t)); }

ScalarField first_sq(double shift) {
  ScalarField s;
  s.value = [shift](double, const Vec& x) { return x[0] * x[0] - shift; };
  s.grad = [](double, const Vec& x) -> Vec {
    Vec g = Vec::Zero(x.size());
    g[0] = 2.0 * x[0];
    return g;
  };
  s.dt = [](double, const Vec&) { return 0.0; };
  return s;
}

VWPair scalar_pair() {
  VWPair p;
  p.V = first_sq(2.25);
  p.W = first_sq(0.0);
  p.c_lower = kInf;
  p.c_upper = 1.0;
  p.w_lower = -0.0225;
  p.w_upper = 9.0;
  return p;
}

InitialSetFamily segment(double half) {
  return [half](double t) {
    InitialSet init;
    init.p = 1;
    init.t = t;
    init.map = [half](const Vec& u) { return Vec::Constant(1, half * (2.0 * u[0] - 1.0)); };
    return init;
  };
}

ShootingConfig tight() {
  ShootingConfig sc;
  sc.integ.rtol = 1e-11;
  sc.integ.atol = 1e-13;
  sc.param_tol = 0.0;
  sc.horizon = 25.0;
  return sc;
}

Trajectory sampled(const std::function<double(double)>& x, const std::function<double(double)>& dx,
                   double a, double b) {
  std::vector<double> ts;
  std::vector<Vec> xs, ds;
  for (int i = 0; i <= 800; ++i) {
    const double t = a + (b - a) * i / 800.0;
    ts.push_back(t);
    xs.push_back(Vec::Constant(1, x(t)));
    ds.push_back(Vec::Constant(1, dx(t)));
  }
  return Trajectory::from_nodes(ts, xs, ds);
}

}  // namespace

TEST_CASE("classification of single trajectories") {
  const VWPair p = scalar_pair();
  const ShootingConfig sc = tight();
  const ExitClassification out = classify(forced_saddle(), p, 0.0, Vec::Constant(1, 3.0), 20.0, sc);
  CHECK(out.outcome == Outcome::Exited);
  CHECK(out.t_end == doctest::Approx(0.0));

  const ExitClassification in = classify(forced_saddle(), p, 0.0, Vec::Constant(1, -0.5), 20.0, sc);
  CHECK(in.outcome == Outcome::Stayed);
  CHECK(in.t_end == doctest::Approx(20.0));

  VectorField zero;
  zero.dim = 1;
  zero.f = [](double, const Vec&) { return Vec::Zero(1); };
  CHECK(classify(zero, p, 0.0, Vec::Constant(1, 2.0), 5.0, sc).outcome == Outcome::Stayed);

  VectorField blow;
  blow.dim = 1;
  blow.f = [](double, const Vec& x) { return Vec::Constant(1, x[0] * x[0] * x[0]); };
  VWPair wide = p;
  wide.w_upper = 1e300;
  const ExitClassification b = classify(blow, wide, 0.0, Vec::Constant(1, 2.0), 5.0, sc);
  CHECK(b.outcome == Outcome::BlewUp);
}

TEST_CASE("staying parameter of the scalar saddle at t = -10") {
  const double t0 = -10.0;
  const StayingResult r =
      find_staying_parameter(forced_saddle(), scalar_pair(), segment(3.0)(t0), t0 + 25.0, tight());
  CHECK(std::abs(r.x0[0] - exact(t0)) < 1e-6);
  CHECK(r.method == "bisection");
}

TEST_CASE("bisection on the unstable axis of a planar saddle") {
  VectorField f;
  f.dim = 2;
  f.f = [](double t, const Vec& x) {
    return (Vec(2) << x[0] + std::cos(2.0 * t), -x[1]).finished();
  };
  VWPair p;
  p.V = first_sq(1.0);
  p.W.value = [](double, const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };
  p.W.grad = [](double, const Vec& x) { return (Vec(2) << 2.0 * x[0], -2.0 * x[1]).finished(); };
  p.c_lower = kInf;
  p.c_upper = 1.0;
  p.w_lower = -1.0;
  p.w_upper = 9.0;
  InitialSet init;
  init.p = 1;
  init.t = 0.0;
  init.map = [](const Vec& u) { return (Vec(2) << 3.0 * (2.0 * u[0] - 1.0), 0.0).finished(); };
  const StayingResult r = find_staying_parameter(f, p, init, 25.0, tight());
  // x1(t) = -int_t^inf e^{t-s} cos 2s ds = -(cos 2t - 2 sin 2t)/5
  CHECK(std::abs(r.x0[0] + 0.2) < 1e-6);
}

TEST_CASE("zero field: every parameter stays") {
  VectorField zero;
  zero.dim = 2;
  zero.f = [](double, const Vec&) { return Vec::Zero(2); };
  VWPair p;
  p.V = first_sq(1.0);
  p.W = first_sq(0.0);
  p.w_lower = -1.0;
  p.w_upper = 4.0;
  InitialSet init;
  init.p = 2;
  init.map = [](const Vec& u) { return Vec(u); };
  ShootingConfig sc = tight();
  const StayingResult r = find_staying_parameter(zero, p, init, 10.0, sc);
  CHECK(r.stayed);
  CHECK(r.exit_time == doctest::Approx(10.0));
}

TEST_CASE("all parameters exiting immediately is reported") {
  VectorField grow;
  grow.dim = 1;
  grow.f = [](double, const Vec& x) { return x; };
  VWPair p = scalar_pair();
  InitialSet init;
  init.p = 1;
  init.map = [](const Vec& u) { return Vec::Constant(1, 3.0 + u[0]); };
  try {
    find_staying_parameter(grow, p, init, 10.0, tight());
    FAIL("expected NoInteriorCandidate");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoInteriorCandidate);
  }
}

TEST_CASE("limit solution of the scalar saddle") {
  ShootingConfig sc = tight();
  sc.integ.rtol = 1e-10;
  sc.integ.atol = 1e-12;
  sc.anchor_tol = 1e-8;
  const ShootingCertificate c = extract_limit_solution(
      forced_saddle(), scalar_pair(), segment(3.0), {-5.0, -10.0, -15.0, -20.0}, 5.0, sc,
      {0.0, 2.25, 2.25});
  CHECK(std::abs(c.trajectory.evaluate(0.0)[0] + 0.5) < 1e-6);
  CHECK(c.status == Status::Pass);
  CHECK(c.anchor_diffs.back() <= 1e-8);
  double worst = 0.0;
  for (int i = 0; i <= 100; ++i) {
    const double t = -5.0 + 0.1 * i;
    worst = std::max(worst, std::abs(c.trajectory.evaluate(t)[0] - exact(t)));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("hyperbolic linear system: anchor at the origin") {
  VectorField f;
  f.dim = 2;
  f.f = [](double, const Vec& x) { return (Vec(2) << x[0], -x[1]).finished(); };
  VWPair p;
  p.V = first_sq(1.0);
  p.W.value = [](double, const Vec& x) { return x[0] * x[0] - x[1] * x[1]; };
  p.W.grad = [](double, const Vec& x) { return (Vec(2) << 2.0 * x[0], -2.0 * x[1]).finished(); };
  p.c_lower = kInf;
  p.c_upper = 1.0;
  p.w_lower = -1.0;
  p.w_upper = 9.0;
  InitialSetFamily fam = [](double t) {
    InitialSet init;
    init.p = 1;
    init.t = t;
    init.map = [](const Vec& u) { return (Vec(2) << 3.0 * (2.0 * u[0] - 1.0), 0.0).finished(); };
    return init;
  };
  ShootingConfig sc = tight();
  sc.anchor_tol = 1e-8;
  const ShootingCertificate c =
      extract_limit_solution(f, p, fam, {-2.0, -4.0, -6.0}, 3.0, sc, {0.0, 1.0, 1.0});
  CHECK(c.trajectory.evaluate(0.0).norm() < 1e-8);
}

TEST_CASE("anchor sequence that does not settle") {
  ShootingConfig sc = tight();
  sc.anchor_tol = 0.0;
  try {
    extract_limit_solution(forced_saddle(), scalar_pair(), segment(3.0), {-1.0, -1.5, -2.0}, 1.0, sc,
                           {0.0, 2.25, 2.25});
    FAIL("expected AnchorsNotCauchy");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AnchorsNotCauchy);
  }
  CHECK_THROWS_AS(extract_limit_solution(forced_saddle(), scalar_pair(), segment(3.0), {-1.0, -2.0},
                                         1.0, sc, {}),
                  std::invalid_argument);
}

TEST_CASE("certify records bounds and witnesses") {
  const VWPair p = scalar_pair();
  const Trajectory good =
      sampled(exact, [](double t) { return -0.5 * (std::cos(t) - std::sin(t)); }, -10.0, 10.0);
  const ShootingCertificate ok = certify(good, p, 0.0, 2.25, 2.25);
  CHECK(ok.status == Status::Pass);
  CHECK(ok.sup_V == doctest::Approx(0.5 - 2.25).epsilon(1e-4));

  const Trajectory bad =
      sampled([](double t) { return exact(t) + 1.0; },
              [](double t) { return -0.5 * (std::cos(t) - std::sin(t)); }, -10.0, 10.0);
  const ShootingCertificate no = certify(bad, p, 0.0, 1.0, 0.0);
  CHECK(no.status == Status::Fail);
  REQUIRE(no.witness_t);
  CHECK(no.witness_x.size() == 1);

  const Trajectory zero = sampled([](double) { return 0.0; }, [](double) { return 0.0; }, -1, 1);
  const ShootingCertificate z = certify(zero, p, 0.0, 2.25, 2.25);
  CHECK(z.status == Status::Pass);
  CHECK(z.sup_V < 0.0);
}
