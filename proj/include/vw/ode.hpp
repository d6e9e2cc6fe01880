#pragma once

#include "vw/error.hpp"
#include "vw/field.hpp"

#include <array>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace vw {

enum class Crossing { Rising, Falling, Any };

struct EventSpec {
  std::function<double(double, const Vec&)> g;
  Crossing direction = Crossing::Any;
  bool terminal = false;
  std::string name;
};

struct EventHit {
  std::size_t index = 0;  // position in the events list
  double t = 0.0;
  Vec x;
  double g = 0.0;
};

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-13;
  double event_tol = 1e-10;
  std::size_t max_steps = 2'000'000;

  void validate() const;
};

// Solution on [t_begin, t_end] with nodes sorted ascending. Segments produced
// by the integrator carry Dormand-Prince dense-output coefficients; other
// segments are interpolated by cubic Hermite.
class Trajectory {
 public:
  Trajectory() = default;

  static Trajectory from_nodes(std::vector<double> times, std::vector<Vec> states,
                               std::vector<Vec> derivatives);

  std::size_t size() const { return t_.size(); }
  int dim() const { return t_.empty() ? 0 : static_cast<int>(x_.front().size()); }
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  double time(std::size_t i) const { return t_[i]; }
  const Vec& state(std::size_t i) const { return x_[i]; }
  const Vec& derivative(std::size_t i) const { return dx_[i]; }
  const std::vector<double>& times() const { return t_; }
  bool has_dense_coefficients() const;

  Vec evaluate(double t) const;

  // Concatenates a trajectory whose span starts where this one ends. The
  // junction keeps this trajectory's node.
  void append(const Trajectory& next);

  void write_csv(std::ostream& os) const;
  void write_csv(const std::string& path) const;

  // Used by the integrator while building.
  struct Segment {
    double t_start = 0.0;  // time where the polynomial parameter is 0
    double h = 0.0;        // signed step; parameter = (t - t_start) / h
    std::array<Vec, 5> r;  // empty r[0] means Hermite fallback
  };
  void push_node(double t, const Vec& x, const Vec& dx);
  void push_segment(Segment seg) { seg_.push_back(std::move(seg)); }
  void replace_last_node(double t, const Vec& x, const Vec& dx);
  void reverse_order();

 private:
  std::vector<double> t_;
  std::vector<Vec> x_;
  std::vector<Vec> dx_;
  std::vector<Segment> seg_;  // seg_[i] spans [t_[i], t_[i+1]]
};

struct IntegrationResult {
  Trajectory trajectory;
  std::vector<EventHit> events;
  bool terminated_by_event = false;
};

IntegrationResult integrate(const VectorField& field, double t0, const Vec& x0, double t_end,
                            const IntegratorConfig& config,
                            const std::vector<EventSpec>& events = {});

Vec evaluate_dense(const Trajectory& traj, double t);

}  // namespace vw
