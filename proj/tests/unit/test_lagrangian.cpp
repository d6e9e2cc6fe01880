#include "vw/lagrangian.hpp"

#include <doctest.h>

#include <cmath>

using namespace vw;

namespace {

Vec v1(double a) { return Vec::Constant(1, a); }
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

LagrangianSystem scalar_system(std::function<double(double, double)> Phi,
                               std::function<double(double, double)> Phi_q,
                               std::function<double(double, double)> Psi) {
  LagrangianSystem L;
  L.m = 1;
  L.A = [](double, const Vec&) { return Mat::Identity(1, 1).eval(); };
  L.A_q = [](double, const Vec&) { return std::vector<Mat>{Mat::Zero(1, 1)}; };
  L.A_t = [](double, const Vec&) { return Mat::Zero(1, 1).eval(); };
  L.Phi = [Phi](double t, const Vec& q) { return Phi(t, q[0]); };
  L.Phi_q = [Phi_q](double t, const Vec& q) { return v1(Phi_q(t, q[0])); };
  L.Psi = [Psi](double t, const Vec& q) { return Psi(t, q[0]); };
  return L;
}

LagrangianSystem oscillator() {
  return scalar_system([](double, double q) { return -0.5 * q * q; },
                       [](double, double q) { return -q; },
                       [](double, double q) { return 0.5 * q * q; });
}

LagrangianSystem repeller() {
  return scalar_system([](double, double q) { return 0.5 * q * q; },
                       [](double, double q) { return q; },
                       [](double, double q) { return 0.5 * q * q; });
}

Trajectory sampled(const std::function<double(double)>& x, const std::function<double(double)>& dx,
                   double a, double b, int n) {
  std::vector<double> ts;
  std::vector<Vec> xs, ds;
  for (int i = 0; i <= n; ++i) {
    const double t = a + (b - a) * i / n;
    ts.push_back(t);
    xs.push_back(v1(x(t)));
    ds.push_back(v1(dx(t)));
  }
  return Trajectory::from_nodes(ts, xs, ds);
}

std::vector<double> range(double a, double b, double step) {
  std::vector<double> out;
  for (double t = a; t <= b + 1e-12; t += step) out.push_back(t);
  return out;
}

}  // namespace

TEST_CASE("Euler-Lagrange field: oscillator and free particle") {
  const VectorField f = el_field(oscillator());
  const Vec y = f(0.0, v2(1.0, 2.0));
  CHECK(y[0] == doctest::Approx(2.0));
  CHECK(y[1] == doctest::Approx(-1.0));

  const VectorField free =
      el_field(scalar_system([](double, double) { return 0.0; }, [](double, double) { return 0.0; },
                             [](double, double q) { return q * q; }));
  const Vec z = free(3.0, v2(-4.0, 0.7));
  CHECK(z[0] == doctest::Approx(0.7));
  CHECK(std::abs(z[1]) < 1e-14);
}

TEST_CASE("Euler-Lagrange field: position-dependent mass") {
  // L = (1 + q^2) qd^2 / 2 gives qdd = -q qd^2 / (1 + q^2)
  LagrangianSystem L = scalar_system([](double, double) { return 0.0; },
                                     [](double, double) { return 0.0; },
                                     [](double, double q) { return q * q; });
  L.A = [](double, const Vec& q) { return Mat::Constant(1, 1, 1.0 + q[0] * q[0]); };
  L.A_q = {};
  CHECK(L.uses_fd());
  const Vec y = el_field(L)(0.0, v2(1.0, 2.0));
  CHECK(y[1] == doctest::Approx(-2.0).epsilon(1e-7));
}

TEST_CASE("Euler-Lagrange field: gyroscopic term") {
  const double b = 0.8;
  LagrangianSystem L;
  L.m = 2;
  L.A = [](double, const Vec&) { return Mat::Identity(2, 2).eval(); };
  L.a = [b](double, const Vec& q) { return v2(-0.5 * b * q[1], 0.5 * b * q[0]); };
  L.Phi = [](double, const Vec&) { return 0.0; };
  L.Psi = [](double, const Vec& q) { return q.squaredNorm(); };
  const Vec x = (Vec(4) << 0.3, -0.2, 1.0, 2.0).finished();
  const Vec y = el_field(L)(0.0, x);
  CHECK(y[2] == doctest::Approx(b * 2.0).epsilon(1e-7));
  CHECK(y[3] == doctest::Approx(-b * 1.0).epsilon(1e-7));
}

TEST_CASE("Hamiltonian form agrees with the Euler-Lagrange field") {
  LagrangianSystem L = scalar_system([](double t, double q) { return q * q + q * q * q * q + q * std::sin(t); },
                                     [](double t, double q) { return 2 * q + 4 * q * q * q + std::sin(t); },
                                     [](double, double q) { return q * q + q * q * q * q; });
  L.Phi_t = [](double t, const Vec& q) { return q[0] * std::cos(t); };
  const HamiltonianSystem H(L);
  const double t = 0.7;
  const Vec q = v1(0.4), qd = v1(-1.3);
  const Vec z = v2(q[0], H.momentum(t, q, qd)[0]);
  const Vec fz = H.field()(t, z);
  const Vec fx = el_field(L)(t, v2(q[0], qd[0]));
  CHECK(fz[0] == doctest::Approx(fx[0]));
  CHECK(fz[1] == doctest::Approx(fx[1]));  // p = qd here
  const double h = 1e-5;
  CHECK(H.dt(t, z) == doctest::Approx((H.H(t + h, z) - H.H(t - h, z)) / (2 * h)).epsilon(1e-7));
  CHECK(H.dt(t, z) == doctest::Approx(-q[0] * std::cos(t)));
  CHECK(H.Y(t, z) == doctest::Approx(L.energy(t, q, qd)));
}

TEST_CASE("V-bar and its inverse") {
  for (double theta : {0.0, 0.25, 0.5, 1.0}) {
    const double R = 2.0;
    for (double r : {2.0, 2.5, 7.0, 40.0})
      CHECK(frak_f(V_bar(r, theta, R), theta, R) == doctest::Approx(r).epsilon(1e-12));
    CHECK(V_bar(R, theta, R) == 0.0);
    CHECK(V_bar(1.0, theta, R) < 0.0);
    CHECK(V_bar_prime(1.0, theta, R) == doctest::Approx(std::pow(R, -theta)));
    CHECK(V_bar_prime(5.0, theta, R) == doctest::Approx(std::pow(5.0, -theta)));
  }
}

TEST_CASE("radius and rate constants") {
  CHECK(R_from_constants(1.0, 1.0, 1.0, 0.0, 0.0) == doctest::Approx(3.0));
  CHECK(R_from_constants(1.0, 0.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(K_from_constants(1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(4.0 + 2.0 * std::sqrt(2.0)));

  LagrangianConstants c;
  c.kappa = 0.5;
  c.R = 2.0;
  c.theta = 1.0;
  c.K = 3.0;
  const EnergyBound b = energy_bound(c, -1.0, 1.0, 0.5, -0.5);
  CHECK(b.global == doctest::Approx(2.0 * std::exp(3.0 / 1.0 * 2.0)));
  CHECK(b.local == doctest::Approx(2.0 * std::exp(3.0)));
}

TEST_CASE("invalid constants are rejected") {
  LagrangianConstants c;
  c.kappa = 0.0;
  c.R = 1.0;
  c.K = 1.0;
  try {
    c.validate();
    FAIL("expected ConstantsInvalid");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConstantsInvalid);
  }
  c.kappa = 1.0;
  c.theta = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("window bounds on W") {
  const LagrangianSystem L = scalar_system([](double, double) { return 0.0; },
                                           [](double, double) { return 0.0; },
                                           [](double, double q) { return q * q; });
  const double R = 3.0;
  TildeWOptions opt;
  opt.Theta_upper = [](double s) { return s; };  // <A q, q> = q^2 = Psi
  const TildeW w = tilde_w_bounds(L, R, 0.0, opt);
  CHECK(w.w_sup == doctest::Approx(R / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(w.w0 == doctest::Approx(-R / std::sqrt(2.0)).epsilon(1e-8));
  CHECK(w.closed_upper >= w.w_sup - 1e-9);
  CHECK(w.closed_upper == doctest::Approx(R / std::sqrt(2.0)).epsilon(1e-6));

  const TildeW zero = tilde_w_bounds(L, 0.0, 0.0, opt);
  CHECK(zero.w0 == 0.0);
  CHECK(zero.w_sup == 0.0);

  const LagrangianSystem flat = scalar_system([](double, double) { return 0.0; },
                                              [](double, double) { return 0.0; },
                                              [](double, double) { return 0.0; });
  try {
    tilde_w_bounds(flat, 1.0, 0.0);
    FAIL("expected UnboundedSublevel");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnboundedSublevel);
  }
}

TEST_CASE("quasiconvexity") {
  const LagrangianSystem duffing =
      scalar_system([](double, double q) { return q * q + q * q * q * q; },
                    [](double, double q) { return 2 * q + 4 * q * q * q; },
                    [](double, double q) { return q * q + q * q * q * q; });
  const RegionSampler box = RegionSampler::fixed_box(v2(-3, -6), v2(3, 6), 2000, 3);
  const ConditionReport ok = check_quasiconvexity(duffing, 1.0, 1.0, box, 0.0, 1.0);
  CHECK(ok.status == Status::Pass);

  const LagrangianSystem quartic =
      scalar_system([](double, double q) { return -q * q * q * q; },
                    [](double, double q) { return -4 * q * q * q; },
                    [](double, double q) { return q * q * q * q; });
  const ConditionReport bad = check_quasiconvexity(quartic, 1.0, 1.0, box, 0.0, 1.0);
  CHECK(bad.status == Status::Fail);
  REQUIRE(bad.witness_t);
  CHECK(bad.witness_x.size() == 2);
}

TEST_CASE("convexity certificate") {
  const RegionSampler box = RegionSampler::fixed_box(v2(-2, -2), v2(2, 2), 1000, 2);
  QuadraticTestOptions qt;
  qt.alpha2 = [](double, const Vec&) { return 0.0; };
  const ConvexityCertificate rep = convexity_certificate(HamiltonianSystem(repeller()), 1.0, 1.0,
                                                         box, 0.0, 1.0, qt);
  CHECK(rep.status == Status::Pass);
  CHECK(rep.rho_hat == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(rep.vartheta == doctest::Approx(1.0));
  CHECK(rep.quadratic_test_worst == doctest::Approx(-2.0));

  const ConvexityCertificate osc = convexity_certificate(HamiltonianSystem(oscillator()), 1.0, 1.0,
                                                         box, 0.0, 1.0, qt);
  CHECK(osc.status == Status::Fail);
  CHECK(osc.rho_hat < 0.0);
  CHECK(osc.witness_t);
}

TEST_CASE("kinetic matrix must be positive definite") {
  LagrangianSystem L = oscillator();
  L.A = [](double, const Vec&) { return Mat::Constant(1, 1, -1.0); };
  try {
    el_field(L)(0.0, v2(1.0, 1.0));
    FAIL("expected SingularKinetic");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularKinetic);
  }
}

TEST_CASE("almost periods of a periodic signal") {
  const Trajectory tr = sampled([](double t) { return std::sin(t); },
                                [](double t) { return std::cos(t); }, 0.0, 60.0, 6000);
  std::vector<double> taus = range(6.2, 6.36, 1e-4);
  for (double t : range(12.5, 12.64, 1e-4)) taus.push_back(t);
  const AlmostPeriodScan s = almost_period_scan(tr, 1e-3, taus, 3.0, 2001);
  REQUIRE(!s.accepted.empty());
  bool near1 = false, near2 = false;
  for (double tau : s.accepted) {
    const double k = std::round(tau / (2 * M_PI));
    CHECK(std::abs(tau - 2 * M_PI * k) <= 1.1e-3);
    near1 = near1 || k == 1.0;
    near2 = near2 || k == 2.0;
  }
  CHECK(near1);
  CHECK(near2);
}

TEST_CASE("almost periods: quasiperiodic and unbounded signals") {
  const double s2 = std::sqrt(2.0);
  const Trajectory qp = sampled([s2](double t) { return std::sin(t) + std::sin(s2 * t); },
                                [s2](double t) { return std::cos(t) + s2 * std::cos(s2 * t); },
                                0.0, 60.0, 6000);
  const AlmostPeriodScan a = almost_period_scan(qp, 1e-3, {2 * M_PI}, 3.0, 2001);
  CHECK(a.accepted.empty());
  CHECK(a.defect[0] > 0.1);

  const Trajectory ramp = sampled([](double t) { return t; }, [](double) { return 1.0; }, 0.0, 30.0, 300);
  const AlmostPeriodScan b = almost_period_scan(ramp, 1e-2, range(1.0, 10.0, 0.5), 3.0, 601);
  CHECK(b.accepted.empty());
  CHECK(std::isinf(b.max_gap));
  CHECK(b.defect.front() == doctest::Approx(1.0).epsilon(1e-9));

  try {
    almost_period_scan(ramp, 1e-2, {11.0}, 3.0, 601);
    FAIL("expected SpanTooShort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SpanTooShort);
  }
}

TEST_CASE("sup of the Lagrangian along a trajectory") {
  std::vector<double> ts;
  std::vector<Vec> xs, ds;
  for (int i = 0; i <= 2000; ++i) {
    const double t = 0.005 * i;
    ts.push_back(t);
    xs.push_back(v2(std::sin(t), std::cos(t)));
    ds.push_back(v2(std::cos(t), -std::sin(t)));
  }
  const Trajectory tr = Trajectory::from_nodes(ts, xs, ds);
  // oscillator along (sin t, cos t): L = (cos^2 - sin^2)/2 = cos(2t)/2
  CHECK(lagrangian_sup(oscillator(), tr) == doctest::Approx(0.5).epsilon(1e-6));
}
