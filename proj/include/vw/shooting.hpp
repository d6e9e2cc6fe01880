#pragma once

#include "vw/fields.hpp"
#include "vw/ode.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vw {

enum class Outcome { Exited, Stayed, BlewUp };
const char* to_string(Outcome o);

struct ExitClassification {
  Outcome outcome = Outcome::Stayed;
  double t_end = 0.0;  // exit, blow-up or horizon time
  Vec x_end;
  double max_V = -kInf;
  double W_end = 0.0;
  bool v_cap_reached = false;
  std::string reason;
};

struct ShootingConfig {
  IntegratorConfig integ;
  double param_tol = 1e-12;  // bisection width and simplex diameter; 0 runs to machine resolution
  int grid_per_dim = 9;
  std::size_t grid_cap = 100000;
  int simplex_restarts = 6;
  int simplex_max_iter = 2000;
  double anchor_tol = 1e-8;
  double anchor_time = 0.0;
  double horizon = 20.0;         // staying classification runs to anchor_time + horizon
  double stitch_spacing = 0.0;   // > 0 assembles the certificate from anchors this far apart
};

// M_t as the image of [0,1]^p.
struct InitialSet {
  int p = 1;
  double t = 0.0;
  std::function<Vec(const Vec&)> map;
  // Which side an exiting trajectory left through (p = 1 bisection). Empty:
  // sign of <x_exit, map(1) - map(0)>.
  std::function<int(double, const Vec&)> exit_side;
};

using InitialSetFamily = std::function<InitialSet(double)>;

ExitClassification classify(const VectorField& field, const VWPair& pair, double t_start,
                            const Vec& x0, double t_horizon, const ShootingConfig& cfg);

struct StayingResult {
  Vec param;
  Vec x0;
  double exit_time = 0.0;  // time spent in the window, horizon - t_start when it stayed
  bool stayed = false;
  int classifications = 0;
  std::string method;
};

StayingResult find_staying_parameter(const VectorField& field, const VWPair& pair,
                                     const InitialSet& init, double t_horizon,
                                     const ShootingConfig& cfg);

struct CertificateEntry {
  std::string name;
  Status status = Status::Pass;
  double measured = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  std::optional<double> witness_t;
};

struct ShootingCertificate {
  Trajectory trajectory;
  double sup_V = 0.0;
  double bound_V = 0.0;
  double W_min = 0.0;
  double W_max = 0.0;
  double omega0 = 0.0;
  double omega_sup = 0.0;
  std::vector<Vec> anchors;
  std::vector<double> anchor_starts;
  std::vector<double> anchor_diffs;
  double cauchy_residual = 0.0;
  Status status = Status::Pass;
  std::vector<CertificateEntry> entries;
  std::optional<double> witness_t;
  Vec witness_x;
  std::string confidence = "numerical candidate";
};

ShootingCertificate certify(const Trajectory& traj, const VWPair& pair, double omega0,
                            double omega_sup, double bound, std::size_t grid = 2001);

struct LimitBounds {
  double omega0 = 0.0;
  double omega_sup = 0.0;
  double bound = 0.0;
};

ShootingCertificate extract_limit_solution(const VectorField& field, const VWPair& pair,
                                           const InitialSetFamily& family,
                                           const std::vector<double>& t_sequence,
                                           double T_anchor, const ShootingConfig& cfg,
                                           const LimitBounds& bounds);

}  // namespace vw
