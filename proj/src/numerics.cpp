#include "vw/numerics.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace vw {

double brent_root(const std::function<double(double)>& f, double a, double b, double xtol,
                  double rtol, int max_iter) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0) == (fb > 0)) throw std::invalid_argument("brent_root: interval does not bracket a root");
  double c = a, fc = fa, d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0) == (fc > 0)) {
      c = a, fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b, b = c, c = a;
      fa = fb, fb = fc, fc = fa;
    }
    const double tol = 2.0 * rtol * std::abs(b) + 0.5 * xtol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0) q = -q;
      else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b, fa = fb;
    b += std::abs(d) > tol ? d : (m > 0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

bool bracket_right(const std::function<double(double)>& f, double a, double& b, double cap) {
  const double fa = f(a);
  double width = b - a;
  while (true) {
    const double fb = f(b);
    if ((fa > 0) != (fb > 0) || fb == 0.0) return true;
    if (b >= cap) return false;
    width *= 2.0;
    b = std::min(a + width, cap);
  }
}

namespace {

constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.0};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

double gk_rec(const std::function<double(double)>& f, double a, double b, double abs_tol,
              double rel_tol, int depth) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = wgk[7] * fc, g = wg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double x = h * xgk[j];
    const double s = f(c - x) + f(c + x);
    k += wgk[j] * s;
    if (j % 2 == 1) g += wg[j / 2] * s;
  }
  k *= h;
  g *= h;
  const double err = std::abs(k - g);
  if (depth <= 0 || err <= std::max(abs_tol, rel_tol * std::abs(k))) return k;
  return gk_rec(f, a, c, 0.5 * abs_tol, rel_tol, depth - 1) +
         gk_rec(f, c, b, 0.5 * abs_tol, rel_tol, depth - 1);
}

}  // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b, double abs_tol,
                    double rel_tol, int max_depth) {
  if (a == b) return 0.0;
  if (a > b) return -integrate_gk(f, b, a, abs_tol, rel_tol, max_depth);
  return gk_rec(f, a, b, abs_tol, rel_tol, max_depth);
}

double maximize_1d(const std::function<double(double)>& f, double a, double b, int grid,
                   double* argmax) {
  if (b < a) std::swap(a, b);
  int best = 0;
  double fbest = f(a);
  for (int i = 1; i <= grid; ++i) {
    const double v = f(a + (b - a) * i / grid);
    if (v > fbest) fbest = v, best = i;
  }
  double lo = a + (b - a) * std::max(0, best - 1) / grid;
  double hi = a + (b - a) * std::min(grid, best + 1) / grid;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++it) {
    if (f1 < f2) {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = f(x1);
    }
  }
  double xbest = a + (b - a) * best / grid;
  for (double x : {x1, x2}) {
    const double v = f(x);
    if (v > fbest) fbest = v, xbest = x;
  }
  if (argmax) *argmax = xbest;
  return fbest;
}

// ---------------------------------------------------------------- Nelder-Mead

namespace {
bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i] < b[i]) return true;
    if (a[i] > b[i]) return false;
  }
  return false;
}
}  // namespace

OptimizeResult nelder_mead(const std::function<double(const Vec&)>& f, const Vec& x0,
                           const NelderMeadOptions& opt) {
  const Eigen::Index n = x0.size();
  std::vector<Vec> pts(n + 1, x0);
  std::vector<double> vals(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) pts[i + 1][i] += opt.initial_step;
  for (Eigen::Index i = 0; i <= n; ++i) vals[i] = f(pts[i]);

  std::vector<int> order(n + 1);
  OptimizeResult res;
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (vals[a] != vals[b]) return vals[a] < vals[b];
      return lex_less(pts[a], pts[b]);
    });
    std::vector<Vec> p2;
    std::vector<double> v2;
    for (int i : order) p2.push_back(pts[i]), v2.push_back(vals[i]);
    pts.swap(p2);
    vals.swap(v2);
  };

  int it = 0, stall = 0;
  double best = std::numeric_limits<double>::infinity();
  for (; it < opt.max_iter; ++it) {
    sort_simplex();
    if (vals[0] < best) best = vals[0], stall = 0;
    else ++stall;
    double diam = 0.0;
    for (Eigen::Index i = 1; i <= n; ++i) diam = std::max(diam, (pts[i] - pts[0]).norm());
    const double floor = 4.0 * std::numeric_limits<double>::epsilon() * pts[0].cwiseAbs().maxCoeff();
    if (diam < opt.x_tol || diam <= floor || vals[0] <= opt.f_target ||
        (opt.stall_iter > 0 && stall >= opt.stall_iter)) {
      res.converged = true;
      break;
    }
    Vec centroid = Vec::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) centroid += pts[i];
    centroid /= static_cast<double>(n);
    const Vec& worst = pts[n];
    Vec xr = centroid + (centroid - worst);
    const double fr = f(xr);
    if (fr < vals[0]) {
      Vec xe = centroid + 2.0 * (centroid - worst);
      const double fe = f(xe);
      if (fe < fr) pts[n] = xe, vals[n] = fe;
      else pts[n] = xr, vals[n] = fr;
    } else if (fr < vals[n - 1]) {
      pts[n] = xr, vals[n] = fr;
    } else {
      const bool outside = fr < vals[n];
      Vec xc = outside ? Vec(centroid + 0.5 * (xr - centroid))
                       : Vec(centroid + 0.5 * (worst - centroid));
      const double fc = f(xc);
      if (fc < (outside ? fr : vals[n])) {
        pts[n] = xc, vals[n] = fc;
      } else {
        for (Eigen::Index i = 1; i <= n; ++i) {
          pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
          vals[i] = f(pts[i]);
        }
      }
    }
  }
  sort_simplex();
  res.x = pts[0];
  res.f = vals[0];
  res.iterations = it;
  return res;
}

// ---------------------------------------------------------------- BFGS

OptimizeResult bfgs(const std::function<double(const Vec&)>& f,
                    const std::function<Vec(const Vec&)>& grad, const Vec& x0,
                    const BfgsOptions& opt) {
  auto g_of = [&](const Vec& x) -> Vec {
    if (grad) return grad(x);
    Vec g(x.size());
    Vec y = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double h = fd_step(x[i]);
      y[i] = x[i] + h;
      const double up = f(y);
      y[i] = x[i] - h;
      const double dn = f(y);
      y[i] = x[i];
      g[i] = (up - dn) / (2 * h);
    }
    return g;
  };
  const Eigen::Index n = x0.size();
  OptimizeResult res;
  Vec x = x0;
  double fx = f(x);
  Vec g = g_of(x);
  Mat Hinv = Mat::Identity(n, n);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (!std::isfinite(fx) || g.norm() <= opt.g_tol * (1.0 + std::abs(fx))) {
      res.converged = std::isfinite(fx);
      break;
    }
    Vec p = -Hinv * g;
    if (p.dot(g) >= 0) {
      Hinv.setIdentity();
      p = -g;
    }
    double step = 1.0;
    Vec xn;
    double fn = 0.0;
    bool ok = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = x + step * p;
      fn = f(xn);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * step * g.dot(p)) {
        ok = true;
        break;
      }
      step *= 0.5;
    }
    if (!ok || (xn - x).norm() <= opt.x_tol * (1.0 + x.norm())) {
      if (ok) x = xn, fx = fn;
      res.converged = ok;
      break;
    }
    Vec gn = g_of(xn);
    Vec s = xn - x, y = gn - g;
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      const double rho = 1.0 / sy;
      Mat I = Mat::Identity(n, n);
      Hinv = (I - rho * s * y.transpose()) * Hinv * (I - rho * y * s.transpose()) +
             rho * s * s.transpose();
    }
    x = xn, fx = fn, g = gn;
  }
  res.x = x;
  res.f = fx;
  res.iterations = it;
  return res;
}

// ---------------------------------------------------------------- Halton

namespace {
constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};
}

Halton::Halton(int dim, std::uint64_t seed) : dim_(dim), shift_(dim, 0.0) {
  if (dim <= 0 || dim > static_cast<int>(std::size(kPrimes)))
    throw std::invalid_argument("Halton: unsupported dimension");
  if (seed != 0) {
    std::mt19937_64 rng(seed);
    for (auto& s : shift_) s = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
}

double Halton::radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

Vec Halton::next() {
  Vec u(dim_);
  for (int j = 0; j < dim_; ++j) {
    double v = radical_inverse(index_, kPrimes[j]) + shift_[j];
    u[j] = v - std::floor(v);
  }
  ++index_;
  return u;
}

double min_eig(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eig(const Mat& S) {
  Eigen::SelfAdjointEigenSolver<Mat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(S.rows() - 1);
}

}  // namespace vw
