#include "vw/helicoid.hpp"
#include "vw/numerics.hpp"

#include <doctest.h>

#include <cmath>

using namespace vw;

namespace {

HelicoidConfig constant_chi(double chi) {
  HelicoidConfig c = HelicoidConfig::default_instance();
  c.chi = [chi](double) { return chi; };
  c.chi1 = c.chi2 = c.chi3 = [](double) { return 0.0; };
  return c;
}

}  // namespace

TEST_CASE("default instance constants") {
  const HelicoidConstants h = helicoid_constants(HelicoidConfig::default_instance());
  CHECK(h.R == doctest::Approx(0.2027400665).epsilon(1e-9));
  CHECK(h.kappa == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(h.K == doctest::Approx(293.9895).epsilon(1e-6));
  CHECK(h.r == doctest::Approx(17.2483).epsilon(1e-5));
  CHECK(h.C == doctest::Approx(39.4019).epsilon(1e-6));
  CHECK(h.q_norm_sq_bound == doctest::Approx(0.90311).epsilon(1e-5));
  CHECK(h.W_bound == doctest::Approx(0.037015).epsilon(1e-5));
  CHECK(h.ap_threshold == doctest::Approx(56.5808).epsilon(1e-6));
  CHECK(h.ap_guaranteed);
  CHECK(h.chain_holds);
  CHECK(h.K <= h.K_rounded);
  CHECK(h.etas.chi_star == doctest::Approx(1.4).epsilon(1e-8));
  // the closed maximum of sqrt(4 s (R - s) / k) is R / sqrt(k), below R sqrt(2/k)
  CHECK(h.W_bound_closed == doctest::Approx(h.R / std::sqrt(60.0)).epsilon(1e-9));
  CHECK(h.W_bound_closed <= h.W_bound);
}

TEST_CASE("constant chi has zero etas") {
  const HelicoidConstants h = helicoid_constants(constant_chi(1.5));
  CHECK(h.etas.eta1 == 0.0);
  CHECK(h.etas.eta2 == 0.0);
  CHECK(h.etas.eta3 == 0.0);
  CHECK(h.C == doctest::Approx(std::pow(15.28, 4.0 / 3.0)));
}

TEST_CASE("energy bound chain over a range of k") {
  for (int i = 0; i <= 40; ++i) {
    const double k = std::pow(10.0, 4.0 * i / 40.0);
    CAPTURE(k);
    HelicoidConfig flat = constant_chi(1.5);
    flat.k = k;
    const HelicoidConstants h0 = helicoid_constants(flat);
    CHECK(h0.r <= h0.C_k29 * (1.0 + 1e-9));
    CHECK(h0.K <= h0.K_rounded * (1.0 + 1e-9));
    if (i == 0) continue;  // see the next test case
    HelicoidConfig c = HelicoidConfig::default_instance();
    c.k = k;
    c.eta_samples = 2000;
    const HelicoidConstants h = helicoid_constants(c);
    CHECK(h.r <= h.C_k29 * (1.0 + 1e-9));
    CHECK(h.K <= h.K_rounded * (1.0 + 1e-9));
  }
}

TEST_CASE("rounded coefficients undershoot at k = 1 when eta2 > 0") {
  // The exact eta2 terms of K at R = (2k)^{-1/3} are
  // sqrt(2) (2/3 (2k)^{-1/4} + 4/3) eta2, about 2.68 eta2 at k = 1, while the
  // rounded bound carries 1.28 eta2. The chain is reported, not assumed.
  HelicoidConfig c = HelicoidConfig::default_instance();
  c.k = 1.0;
  const HelicoidConstants h = helicoid_constants(c);
  CHECK(h.K > h.K_rounded);
  CHECK(h.r > h.C_k29);
  CHECK(!h.chain_holds);
  const double s2 = std::sqrt(2.0);
  const double eta2_terms = s2 * (2.0 / 3.0 * std::pow(2.0, -0.25) + 4.0 / 3.0) * h.etas.eta2;
  CHECK(h.K - eta2_terms + 1.28 * h.etas.eta2 <= h.K_rounded);
}

TEST_CASE("almost-periodicity label below the threshold") {
  HelicoidConfig c = HelicoidConfig::default_instance();
  c.k = 50.0;
  const HelicoidConstants h = helicoid_constants(c);
  CHECK(!h.ap_guaranteed);
  CHECK(h.ap_threshold > 50.0);
}

TEST_CASE("kinetic matrix and energy") {
  const LagrangianSystem L = build_helicoid(HelicoidConfig::default_instance());
  const Vec q = (Vec(2) << 2.0, 0.0).finished();
  const Mat A = L.A(0.0, q);
  CHECK(A(0, 0) == 1.0);
  CHECK(A(1, 1) == doctest::Approx(6.25));
  CHECK(A(0, 1) == 0.0);
  const Vec qd = (Vec(2) << 0.0, std::sqrt(0.32)).finished();
  CHECK(0.5 * qd.dot(A * qd) == doctest::Approx(1.0));
}

TEST_CASE("written-out field matches the Euler-Lagrange field") {
  const HelicoidConfig c = HelicoidConfig::default_instance();
  const VectorField a = helicoid_field(c);
  const VectorField b = el_field(build_helicoid(c));
  Halton h(5, 11);
  for (int i = 0; i < 50; ++i) {
    const Vec u = h.next();
    const double t = -20.0 + 40.0 * u[0];
    const Vec x = (Vec(4) << u[1] - 0.5, u[2] - 0.5, 4.0 * u[3] - 2.0, 4.0 * u[4] - 2.0).finished();
    const Vec d = a(t, x) - b(t, x);
    CHECK(d.norm() <= 1e-9 * (1.0 + a(t, x).norm()));
  }
}

TEST_CASE("hypotheses of the helicoid") {
  HelicoidConfig small = HelicoidConfig::default_instance();
  small.k = 0.5;
  try {
    build_helicoid(small);
    FAIL("expected HypothesisViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolated);
  }
  try {
    build_helicoid(constant_chi(0.5));
    FAIL("expected HypothesisViolated");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HypothesisViolated);
  }
}

TEST_CASE("convexity coefficient alpha2") {
  const auto a2 = helicoid_alpha2(constant_chi(1.5));
  CHECK(a2(0.0, (Vec(2) << 0.0, 0.0).finished()) == 0.0);
  const double q1 = 2.0, c2 = 2.25;
  CHECK(a2(0.0, (Vec(2) << q1, 0.0).finished()) ==
        doctest::Approx(2.0 * (3 * q1 * q1 - c2) / std::pow(c2 + q1 * q1, 3)));
}
