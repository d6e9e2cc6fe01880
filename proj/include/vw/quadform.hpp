#pragma once

#include "vw/fields.hpp"
#include "vw/shooting.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vw {

// t -> S(t), symmetric. Without an analytic derivative, S'(t) is taken by
// central differences with step 1e-5 (1 + |t|).
struct SymmetricFormPath {
  int n = 0;
  std::function<Mat(double)> S;
  std::function<Mat(double)> S_dot;

  Mat operator()(double t) const { return S(t); }
  Mat derivative(double t) const;

  static SymmetricFormPath constant(const Mat& S);
  // Rows "t,s11,s12,...,snn" (an optional header line is skipped), cubic
  // spline interpolation per entry.
  static SymmetricFormPath from_csv(const std::string& path);
};

struct SpectralSplit {
  Vec eigenvalues;     // ascending
  Mat eigenvectors;    // columns, orthonormal
  Mat P_plus, P_minus;
  Mat basis_plus;      // eigenvectors of the positive eigenvalues
  Vec lambda_plus;     // the positive eigenvalues
  int n_plus = 0, n_minus = 0;
  bool indefinite = false;
};

SpectralSplit spectral_split(const Mat& S);
SpectralSplit spectral_split(const SymmetricFormPath& S, double t);

Vec fixed_time_retraction(const SymmetricFormPath& S, double t, double w, const Vec& x);

// Checks min eig(C A + A^T C + C') >= 1 on the grid.
ConditionReport dichotomy_form_check(const std::function<Mat(double)>& A,
                                     const SymmetricFormPath& C, const std::vector<double>& grid);

double F_of_r(double r, double c, double d, double m);
double F_prime(double r, double c, double d, double m);
double r_quad(double c, double d, double m, double spread);
double r_star(double c, double d, double m, double spread);

// M_t = {x : 0 <= <S(t)x,x>/phi(t)^2 <= w_upper} restricted to L_+(t), as the
// image of the cube [0,1]^{n_+} mapped radially onto the unit ball.
InitialSetFamily form_ball_family(const SymmetricFormPath& S, double w_upper,
                                  std::function<double(double)> phi = {});

struct QuasilinearSystem {
  int n = 0;
  std::function<Mat(double)> A;
  std::function<Vec(double, const Vec&)> g;
  std::function<double(double)> phi;
  std::function<double(double)> phi_dot;
  double a = 0.0;      // sup ||A||
  double k = 0.0;      // growth and Lipschitz constant of g
  double l = 0.0;      // sup |phi'/phi|
  double c = 0.0;      // sup ||C||
  double sigma = 0.0;  // inf |det C|
  double delta = 0.0;  // min(inf rho, inf omega) for the boundary value example
  SymmetricFormPath C;

  double d() const { return 0.5 - c * (k + l); }
  double m() const { return a + k + l; }
  VectorField field() const;
};

struct QuasilinearVW {
  VWPair pair;
  InitialSetFamily family;
  double r0 = 0.0;
  double alpha_lower = 0.0;
  double lambda_minus_inf = 0.0;
  double lambda_plus_sup = 0.0;
  double omega0 = 0.0;
  double omega_sup = 0.0;
  double nu = 0.0;  // sampled at the first window time
};

QuasilinearVW build_quasilinear_vw(const QuasilinearSystem& sys, const SymmetricFormPath& C,
                                   double r0, const std::vector<double>& window_grid);

struct BvpInputs {
  std::function<double(double)> rho;
  std::function<double(double)> omega;
  std::function<double(double, double, double)> Z;  // Z(t, z, z')
  double ell = 0.0;
  std::function<double(double)> phi;
  std::function<double(double)> phi_dot;
  std::vector<double> grid;  // window used for the sup/inf constants
};

// Scalar second-order problem (z'/rho)' - omega z = Z as a 2-D quasilinear
// system with guiding form x1 x2 / delta. Throws HypothesisViolated when
// k + l >= delta.
QuasilinearSystem build_bvp_system(const BvpInputs& in);
// Same construction without the solvability check.
QuasilinearSystem make_bvp_system(const BvpInputs& in);

struct HypothesisOptions {
  std::vector<double> grid;
  RegionSampler sampler;  // boxes over x
  bool check_lipschitz = true;
};

// c(k+l) < 1/2, the growth bound on g, the Lipschitz bound and the
// dichotomy form, each on samples. A failure records a witness point.
ConditionReport check_quasilinear_hypotheses(const QuasilinearSystem& sys,
                                             const HypothesisOptions& opt);

// U = <C(x-y), x-y>/phi^2, V = ||x||^2/phi^2, eta(u) = u,
// beta = (1 - 2(k+l))/c, b = 4cr.
UniquenessProblem quasilinear_uniqueness(const QuasilinearSystem& sys, double r);

struct PencilSlice {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda_minus_plus = 0.0;  // minimal value of the pencil restricted to L_+
  double M = 0.0;                  // max |value| of B' - mu B
  double mu_minus = 0.0;           // minimal value of S' - mu B
};

Vec generalized_eigenvalues(const Mat& S, const Mat& B);
PencilSlice pencil_charvals(const SymmetricFormPath& S, const SymmetricFormPath& B, double t);

struct PencilData {
  SymmetricFormPath S, B;
  std::function<double(double)> gamma;
  std::function<double(double)> Gamma;
  std::function<double(double)> Delta;
  double xi = std::numeric_limits<double>::quiet_NaN();        // NaN: inf mu_-/gamma on the grid
  double varsigma = std::numeric_limits<double>::quiet_NaN();  // NaN: sup M/gamma on the grid
  double v0 = 1.0;
  double divergence_cap = 1e12;  // the integral must reach its target below v0 * cap
};

struct PencilBound {
  double v_star = 0.0;
  double spread = 0.0;  // sup lambda+ - inf lambda- on the grid
  double xi = 0.0, varsigma = 0.0;
  double omega0 = 0.0, omega_sup = 0.0;
  std::vector<double> grid;
  std::vector<PencilSlice> slices;
  VWPair pair;
  InitialSetFamily family;
  std::function<double(double)> alpha_lower;
  std::function<double(double)> F;
};

PencilBound pencil_bound(const PencilData& pd, const std::vector<double>& grid);

}  // namespace vw
