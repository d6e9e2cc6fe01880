#pragma once

#include "vw/error.hpp"
#include "vw/field.hpp"
#include "vw/ode.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace vw {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Status { Pass, Fail, Inconclusive };
const char* to_string(Status s);

// The domain Omega: an axis-aligned box (entries may be infinite) plus an
// optional predicate.
struct Domain {
  Vec lo, hi;
  std::function<bool(double, const Vec&)> predicate;

  bool contains(double t, const Vec& x) const;
  bool bounded() const;
};

struct VWPair {
  ScalarField V;
  ScalarField W;
  double c_lower = kInf;  // c_*; infinity disables the lower inequality
  double c_upper = 1.0;   // c^*
  double w_lower = -1.0;  // w_*
  double w_upper = 1.0;   // w^*
  double V_cap = kInf;    // V^*
  Domain omega;

  void validate() const;
  bool in_window(double t, const Vec& x) const;  // w_* < W < w^*
};

enum class SamplingStrategy { Grid, QuasiRandom };

struct RegionSampler {
  SamplingStrategy strategy = SamplingStrategy::QuasiRandom;
  std::size_t count = 4096;
  std::function<std::pair<Vec, Vec>(double)> box;  // bounding box per time slice
  std::uint64_t seed = 1;
  std::size_t time_slices = 9;

  static RegionSampler fixed_box(Vec lo, Vec hi, std::size_t count, std::uint64_t seed = 1,
                                 SamplingStrategy strategy = SamplingStrategy::QuasiRandom);

  std::vector<Vec> samples(double t) const;
  std::vector<double> times(double t0, double t1) const;
};

struct ConditionReport {
  std::string condition;
  Status status = Status::Pass;
  double worst_value = 0.0;
  std::optional<double> witness_t;
  Vec witness_x;
  std::size_t samples = 0;
  std::map<std::string, double> constants;
  std::vector<std::string> notes;
};

// Condition (A): samples with V >= 0 inside the W-window; checks W' > 0 and
// -c_* W' <= V' <= c^* W'. Reports measured ratios as c_star_measured and
// c_upper_measured.
ConditionReport check_condition_A(const VWPair& pair, const VectorField& field,
                                  const RegionSampler& sampler, double t0, double t1);

// Sampled inf of W' over V > 0 inside the W-window at time t.
double estimate_alpha(const VWPair& pair, const VectorField& field, const RegionSampler& sampler,
                      double t);

struct LevelSetOptions {
  int starts = 20;
  std::uint64_t seed = 7;
  Vec lo, hi;  // search box; empty means pair.omega's box
  double v_tol = 1e-8;
  bool include_interior = false;  // extrema over {V <= 0} instead of {V = 0}
};

struct LevelExtrema {
  double w0 = 0.0;
  double w_sup = 0.0;
  Vec argmin, argmax;
  bool consistent = true;  // w_* < w0 <= w_sup < w^*
  int accepted_starts = 0;
};

LevelExtrema level_extrema(const VWPair& pair, double t, const LevelSetOptions& opt = {});

struct Horizon {
  std::vector<double> t, alpha, w0, w_sup;
  std::vector<double> cumulative;  // trapezoid integral of alpha from t.front()
  double omega0 = 0.0;
  double omega_sup = 0.0;
  double alpha_min = 0.0;

  double spread() const { return omega_sup - omega0; }
  double integral(double a, double b) const;
  double tau_plus(double t) const;
  double tau_minus(double t) const;
};

Horizon horizon_from_grid(std::vector<double> t, std::vector<double> alpha,
                          std::vector<double> w0, std::vector<double> w_sup);

struct HorizonOptions {
  LevelSetOptions level;
  std::function<double(double)> alpha_lower;  // analytic lower bound for alpha, if known
};

Horizon horizon_quantities(const VWPair& pair, const VectorField& field,
                           const std::vector<double>& grid, const RegionSampler& sampler,
                           const HorizonOptions& opt = {});

double v_bound(double c_lower, double c_upper, double omega0, double omega_sup);
double v_bound(const VWPair& pair, double omega0, double omega_sup);

struct TrajectoryCheckOptions {
  double tol = 1e-8;
  std::size_t grid = 2001;
  std::function<double(double)> alpha;  // enables the zero-existence check
};

ConditionReport trajectory_check(const VWPair& pair, const Trajectory& traj,
                                 const TrajectoryCheckOptions& opt = {});

// U(t, x, y) on paired states.
struct PairField {
  std::function<double(double, const Vec&, const Vec&)> value;
  std::function<Vec(double, const Vec&, const Vec&)> grad_x;
  std::function<Vec(double, const Vec&, const Vec&)> grad_y;
  std::function<double(double, const Vec&, const Vec&)> dt;

  double derivative_along(const VectorField& f, double t, const Vec& x, const Vec& y) const;
};

struct UniquenessProblem {
  PairField U;
  ScalarField V;                                  // V-tilde = max(V(x), V(y))
  std::function<double(double)> eta;
  std::function<double(double, double)> beta;     // beta(t, r)
  std::function<double(double, double)> b;       // empty: sampled max |U|
  double r = 1.0;
};

// Sampler boxes are over the concatenated state (x, y).
ConditionReport uniqueness_certificate(const UniquenessProblem& prob, const VectorField& field,
                                       double t0, double t1, const RegionSampler& sampler);

}  // namespace vw
