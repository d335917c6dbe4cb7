#pragma once

#include <cstddef>
#include <limits>
#include <vector>

namespace taglife {

/// Natural cubic smoothing spline: minimizes sum (f(x_i)-y_i)^2 +
/// lambda * integral f''^2. Knots at the data abscissae; C2-continuous;
/// linear extrapolation beyond the boundary knots.
class SmoothingSpline {
 public:
  /// Fit with a fixed smoothing parameter. Requires n >= 4 and strictly
  /// increasing x.
  static SmoothingSpline fit(const std::vector<double>& x, const std::vector<double>& y,
                             double lambda);

  /// Fit with lambda chosen by generalized cross-validation over a fixed
  /// logarithmic grid 10^{-3..3} (half-decade steps) scaled by n.
  /// Picks lambda on a log grid by generalized cross-validation scored on
  /// first differences; `lambda_max` caps the grid (curve-derived caps stop
  /// a flat GCV profile from oversmoothing a short transition).
  static SmoothingSpline fit_gcv(const std::vector<double>& x, const std::vector<double>& y,
                                 double lambda_max = std::numeric_limits<double>::infinity());

  double value(double t) const;
  double derivative(double t) const;

  double lambda() const { return lambda_; }
  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& fitted() const { return f_; }
  const std::vector<double>& second_derivatives() const { return m_; }

 private:
  std::vector<double> x_;  // knots
  std::vector<double> f_;  // fitted values at knots
  std::vector<double> m_;  // second derivatives at knots (natural: ends zero)
  double lambda_ = 0.0;

  std::size_t interval(double t) const;
};

/// Symmetric positive-definite pentadiagonal system solver (LDL^T), plus
/// the central band of the inverse for hat-matrix traces.
struct Pentadiagonal {
  std::vector<double> d0;  // main diagonal, size n
  std::vector<double> d1;  // first superdiagonal, size n-1
  std::vector<double> d2;  // second superdiagonal, size n-2

  void factor();                                    // in place: L and D
  std::vector<double> solve(std::vector<double> b) const;  // after factor()
  /// Entries of the inverse within the band: (diag, off1, off2).
  void inverse_band(std::vector<double>& z0, std::vector<double>& z1,
                    std::vector<double>& z2) const;  // after factor()
};

}  // namespace taglife
