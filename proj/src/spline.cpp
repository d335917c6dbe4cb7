#include "taglife/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "taglife/errors.hpp"

namespace taglife {

void Pentadiagonal::factor() {
  const std::size_t n = d0.size();
  for (std::size_t i = 0; i < n; ++i) {
    double di = d0[i];
    if (i >= 1) di -= d1[i - 1] * d1[i - 1] * d0[i - 1];
    if (i >= 2) di -= d2[i - 2] * d2[i - 2] * d0[i - 2];
    if (di <= 0.0) throw DataError("pentadiagonal system not positive definite");
    d0[i] = di;
    if (i + 1 < n) {
      double v = d1[i];
      if (i >= 1) v -= d2[i - 1] * d1[i - 1] * d0[i - 1];
      d1[i] = v / di;
    }
    if (i + 2 < n) d2[i] = d2[i] / di;
  }
}

std::vector<double> Pentadiagonal::solve(std::vector<double> b) const {
  const std::size_t n = d0.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1) b[i] -= d1[i - 1] * b[i - 1];
    if (i >= 2) b[i] -= d2[i - 2] * b[i - 2];
  }
  for (std::size_t i = 0; i < n; ++i) b[i] /= d0[i];
  for (std::size_t k = n; k-- > 0;) {
    if (k + 1 < n) b[k] -= d1[k] * b[k + 1];
    if (k + 2 < n) b[k] -= d2[k] * b[k + 2];
  }
  return b;
}

void Pentadiagonal::inverse_band(std::vector<double>& z0, std::vector<double>& z1,
                                 std::vector<double>& z2) const {
  const std::size_t n = d0.size();
  z0.assign(n, 0.0);
  z1.assign(n > 1 ? n - 1 : 0, 0.0);
  z2.assign(n > 2 ? n - 2 : 0, 0.0);
  auto z = [&](std::size_t r, std::size_t c) -> double {
    const std::size_t lo = std::min(r, c), hi = std::max(r, c);
    switch (hi - lo) {
      case 0: return z0[lo];
      case 1: return z1[lo];
      default: return z2[lo];
    }
  };
  // Takahashi recurrence over the band, rows bottom-up.
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t jmax = std::min(i + 2, n - 1);
    for (std::size_t j = jmax + 1; j-- > i;) {
      double v = (i == j) ? 1.0 / d0[i] : 0.0;
      if (i + 1 < n) v -= d1[i] * z(i + 1, j);
      if (i + 2 < n) v -= d2[i] * z(i + 2, j);
      switch (j - i) {
        case 0: z0[i] = v; break;
        case 1: z1[i] = v; break;
        default: z2[i] = v; break;
      }
      if (j == i) break;
    }
  }
}

namespace {

struct SplineSystem {
  std::vector<double> h;               // knot gaps
  std::vector<double> b0, b1, b2;      // Q^T Q band
  std::vector<double> r0, r1;          // R band (tridiagonal)
  std::vector<double> qty;             // Q^T y
};

SplineSystem build_system(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const std::size_t m = n - 2;
  SplineSystem s;
  s.h.resize(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    s.h[i] = x[i + 1] - x[i];
    if (s.h[i] <= 0.0) throw DataError("spline abscissae must be strictly increasing");
  }
  s.b0.resize(m);
  s.b1.assign(m > 1 ? m - 1 : 0, 0.0);
  s.b2.assign(m > 2 ? m - 2 : 0, 0.0);
  s.r0.resize(m);
  s.r1.assign(m > 1 ? m - 1 : 0, 0.0);
  s.qty.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double a = 1.0 / s.h[j];
    const double b = -1.0 / s.h[j] - 1.0 / s.h[j + 1];
    const double c = 1.0 / s.h[j + 1];
    s.b0[j] = a * a + b * b + c * c;
    if (j + 1 < m) {
      const double bn = -1.0 / s.h[j + 1] - 1.0 / s.h[j + 2];
      s.b1[j] = b * c + c * bn;
    }
    if (j + 2 < m) s.b2[j] = c / s.h[j + 2];
    s.r0[j] = (s.h[j] + s.h[j + 1]) / 3.0;
    if (j + 1 < m) s.r1[j] = s.h[j + 1] / 6.0;
    s.qty[j] = a * y[j] + b * y[j + 1] + c * y[j + 2];
  }
  return s;
}

struct FitResult {
  std::vector<double> f;      // fitted values
  std::vector<double> gamma;  // interior second derivatives
  double rss = 0.0;
  double trace_hat = 0.0;
};

FitResult solve_for_lambda(const SplineSystem& s, const std::vector<double>& y, double lambda,
                           bool want_trace) {
  const std::size_t m = s.qty.size();
  const std::size_t n = y.size();
  Pentadiagonal M;
  M.d0.resize(m);
  M.d1.resize(m > 1 ? m - 1 : 0);
  M.d2.resize(m > 2 ? m - 2 : 0);
  for (std::size_t j = 0; j < m; ++j) M.d0[j] = s.r0[j] + lambda * s.b0[j];
  for (std::size_t j = 0; j + 1 < m; ++j) M.d1[j] = s.r1[j] + lambda * s.b1[j];
  for (std::size_t j = 0; j + 2 < m; ++j) M.d2[j] = lambda * s.b2[j];
  M.factor();

  FitResult r;
  r.gamma = M.solve(s.qty);
  r.f = y;
  for (std::size_t j = 0; j < m; ++j) {
    const double g = lambda * r.gamma[j];
    r.f[j] -= g / s.h[j];
    r.f[j + 1] += g * (1.0 / s.h[j] + 1.0 / s.h[j + 1]);
    r.f[j + 2] -= g / s.h[j + 1];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double e = y[i] - r.f[i];
    r.rss += e * e;
  }
  if (want_trace) {
    std::vector<double> z0, z1, z2;
    M.inverse_band(z0, z1, z2);
    double tr = 0.0;
    for (std::size_t j = 0; j < m; ++j) tr += z0[j] * s.b0[j];
    for (std::size_t j = 0; j + 1 < m; ++j) tr += 2.0 * z1[j] * s.b1[j];
    for (std::size_t j = 0; j + 2 < m; ++j) tr += 2.0 * z2[j] * s.b2[j];
    r.trace_hat = static_cast<double>(n) - lambda * tr;
  }
  return r;
}

}  // namespace

SmoothingSpline SmoothingSpline::fit(const std::vector<double>& x, const std::vector<double>& y,
                                     double lambda) {
  if (x.size() != y.size()) throw UsageError("spline: x/y size mismatch");
  if (x.size() < 4) throw DataError("spline: need at least 4 support points");
  const SplineSystem s = build_system(x, y);
  const FitResult r = solve_for_lambda(s, y, lambda, false);
  SmoothingSpline sp;
  sp.x_ = x;
  sp.f_ = r.f;
  sp.m_.assign(x.size(), 0.0);
  for (std::size_t j = 0; j < r.gamma.size(); ++j) sp.m_[j + 1] = r.gamma[j];
  sp.lambda_ = lambda;
  return sp;
}

SmoothingSpline SmoothingSpline::fit_gcv(const std::vector<double>& x,
                                         const std::vector<double>& y, double lambda_max) {
  if (x.size() != y.size()) throw UsageError("spline: x/y size mismatch");
  if (x.size() < 4) throw DataError("spline: need at least 4 support points");
  const SplineSystem s = build_system(x, y);
  const double n = static_cast<double>(x.size());
  const double scale = n;
  double best_lambda = std::min(scale, lambda_max);
  double best_gcv = std::numeric_limits<double>::infinity();
  double prev_lambda = -1.0;
  for (double e = -3.0; e <= 5.0 + 1e-9; e += 0.5) {
    const double lambda = std::min(scale * std::pow(10.0, e), lambda_max);
    if (lambda == prev_lambda) break;  // cap reached, grid exhausted
    prev_lambda = lambda;
    const FitResult r = solve_for_lambda(s, y, lambda, true);
    // Score on first differences: for cumulative count curves the level
    // errors are a random walk, which makes level-based GCV undersmooth
    // catastrophically; the increments are (nearly) independent.
    double rss_diff = 0.0;
    for (std::size_t i = 1; i < y.size(); ++i) {
      const double resid = (y[i] - y[i - 1]) - (r.f[i] - r.f[i - 1]);
      rss_diff += resid * resid;
    }
    const double nd = n - 1.0;
    const double denom = 1.0 - (r.trace_hat - 1.0) / nd;  // level absorbed by differencing
    if (denom <= 0.0) continue;
    const double gcv = (rss_diff / nd) / (denom * denom);
    if (gcv < best_gcv) {
      best_gcv = gcv;
      best_lambda = lambda;
    }
  }
  return fit(x, y, best_lambda);
}

std::size_t SmoothingSpline::interval(double t) const {
  if (t <= x_.front()) return 0;
  if (t >= x_.back()) return x_.size() - 2;
  const auto it = std::upper_bound(x_.begin(), x_.end(), t);
  return static_cast<std::size_t>(it - x_.begin()) - 1;
}

double SmoothingSpline::value(double t) const {
  // Linear extrapolation beyond the boundary knots (natural spline).
  if (t < x_.front()) return f_.front() + derivative(x_.front()) * (t - x_.front());
  if (t > x_.back()) return f_.back() + derivative(x_.back()) * (t - x_.back());
  const std::size_t i = interval(t);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - t) / h;
  const double b = (t - x_[i]) / h;
  return a * f_[i] + b * f_[i + 1] + ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double SmoothingSpline::derivative(double t) const {
  const double lo = x_.front(), hi = x_.back();
  const double tc = std::clamp(t, lo, hi);
  const std::size_t i = interval(tc);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - tc) / h;
  const double b = (tc - x_[i]) / h;
  return (f_[i + 1] - f_[i]) / h -
         (3.0 * a * a - 1.0) * h * m_[i] / 6.0 + (3.0 * b * b - 1.0) * h * m_[i + 1] / 6.0;
}

}  // namespace taglife
