#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "taglife/armax.hpp"
#include "taglife/errors.hpp"
#include "taglife/synth.hpp"

using namespace taglife;

namespace {

constexpr double kPi = 3.14159265358979323846;

TagSeries make_series(int t0, int t_star, int total, std::uint64_t seed) {
  TagSeries ts;
  ts.summary.t0 = t0;
  ts.summary.t_star = t_star;
  ts.summary.t_e = total - 1;
  std::mt19937_64 rng(seed);
  for (int m = t0; m < total; ++m) {
    VibrancyFrame f;
    f.minute = m;
    f.y = static_cast<std::int64_t>(rng() % 20);
    f.rt = static_cast<std::int64_t>(rng() % 8);
    f.rp = static_cast<std::int64_t>(rng() % 5);
    f.src_alpha = m - t0;
    f.follow_alpha = 100.0 + m;
    ts.frames.push_back(f);
  }
  return ts;
}

}  // namespace

TEST_CASE("build_design excludes short growth phases and aligns lags") {
  std::map<std::string, TagSeries> series;
  series["short"] = make_series(10, 13, 40, 1);   // t* - t0 = 3 -> excluded
  series["long"] = make_series(5, 15, 40, 2);     // 10 rows
  std::vector<ClassAssignment> assignments = {{"short", TagClass::Winner, {}},
                                              {"long", TagClass::Winner, {}}};
  const RegressionDesign d = build_design(series, assignments, TagClass::Winner, false);
  CHECK(d.excluded_tags == std::vector<std::string>{"short"});
  REQUIRE(d.segments.size() == 1);
  const DesignSegment& seg = d.segments[0];
  CHECK(seg.y.size() == 10);
  CHECK(d.predictor_names.size() == 5);

  // Row for minute t uses frame values from t-1.
  const TagSeries& ts = series["long"];
  for (int row = 0; row < 10; ++row) {
    const int t = 5 + 1 + row;
    const VibrancyFrame& now = ts.frames[static_cast<std::size_t>(t - 5)];
    const VibrancyFrame& lag = ts.frames[static_cast<std::size_t>(t - 1 - 5)];
    CHECK(seg.y[row] == doctest::Approx(std::log1p(static_cast<double>(now.y))));
    CHECK(seg.x(row, 0) == 1.0);
    CHECK(seg.x(row, 1) == doctest::Approx(std::log1p(static_cast<double>(lag.rt))));
    CHECK(seg.x(row, 2) == doctest::Approx(std::log1p(static_cast<double>(lag.rp))));
    CHECK(seg.x(row, 3) == doctest::Approx(static_cast<double>(lag.src_alpha)));
    CHECK(seg.x(row, 4) == doctest::Approx(std::log1p(lag.follow_alpha)));
  }

  CHECK_THROWS_AS(build_design(series, assignments, TagClass::AlsoRan, false), DataError);
}

TEST_CASE("loglik at phi=psi=0 equals the Gaussian OLS loglik") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(2);
  beta << 0.4, -0.2;
  const RegressionDesign d = gen_armax_series(beta, 1.0, 0.0, 0.0, 0.0, 1.0, 4, 50, 5, truth);

  // Direct OLS on the stacked design.
  const Eigen::Index n = d.n_obs();
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  Eigen::Index row = 0;
  for (const DesignSegment& seg : d.segments) {
    X.middleRows(row, seg.y.size()) = seg.x;
    y.segment(row, seg.y.size()) = seg.y;
    row += seg.y.size();
  }
  const Eigen::VectorXd bhat = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  const double rss = (y - X * bhat).squaredNorm();
  const double s2 = rss / static_cast<double>(n);
  const double ols_ll =
      -0.5 * static_cast<double>(n) * (std::log(2.0 * kPi * s2) + 1.0);
  CHECK(armax_loglik(d, bhat, 0.0, 0.0, 0.0, s2) == doctest::Approx(ols_ll).epsilon(1e-10));
}

TEST_CASE("fit recovers parameters on a white-noise design") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(2);
  beta << 0.0, 0.0;
  const RegressionDesign d = gen_armax_series(beta, 0.0, 0.0, 0.0, 0.0, 1.0, 30, 60, 11, truth);
  const ArmaxFit fit = fit_armax(d);
  CHECK(fit.loglik >= fit.start_loglik - 1e-8);
  for (Eigen::Index j = 0; j < fit.beta.size(); ++j)
    CHECK(std::abs(fit.beta[j]) < 3.0 * fit.beta_se[j]);
  // On white noise the AR and MA roots nearly cancel, so phi1/psi are not
  // identified individually; the likelihood and innovation variance are.
  // The gain over the phi=psi=0 model should be tiny (LR stat a few units).
  const double null_ll = armax_loglik(d, fit.beta, 0.0, 0.0, 0.0, fit.sigma2);
  CHECK(fit.loglik - null_ll < 6.0);
  CHECK(fit.sigma2 == doctest::Approx(1.0).epsilon(0.1));
  CHECK(fit.aic == doctest::Approx(2.0 * (fit.beta.size() + 4) - 2.0 * fit.loglik));
}

TEST_CASE("fit recovers ARMA parameters on a pinned simulation") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(4);
  beta << 0.3, 0.15, 0.001, 0.1;
  const RegressionDesign d =
      gen_armax_series(beta, 0.5, 0.5, -0.2, 0.3, 1.0, 60, 60, 29, truth);
  const ArmaxFit fit = fit_armax(d);
  CHECK(fit.loglik >= fit.start_loglik);
  CHECK(fit.phi1 == doctest::Approx(0.5).epsilon(0.35));
  CHECK(fit.phi2 == doctest::Approx(-0.2).epsilon(0.6));
  CHECK(fit.psi == doctest::Approx(0.3).epsilon(0.5));
  for (Eigen::Index j = 1; j < 5; ++j)
    CHECK(std::abs(fit.beta[j] - truth.beta[j]) < 3.0 * fit.beta_se[j]);
}

TEST_CASE("segment order does not change the likelihood or fit") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(2);
  beta << 0.2, 0.1;
  RegressionDesign d = gen_armax_series(beta, 0.0, 0.4, -0.1, 0.2, 1.0, 6, 40, 31, truth);
  Eigen::VectorXd b0(3);
  b0 << 0.1, 0.2, 0.1;
  const double ll = armax_loglik(d, b0, 0.3, -0.1, 0.1, 1.2);
  RegressionDesign shuffled = d;
  std::reverse(shuffled.segments.begin(), shuffled.segments.end());
  CHECK(armax_loglik(shuffled, b0, 0.3, -0.1, 0.1, 1.2) == doctest::Approx(ll).epsilon(1e-12));

  const ArmaxFit fa = fit_armax(d);
  const ArmaxFit fb = fit_armax(shuffled);
  CHECK(fa.loglik == doctest::Approx(fb.loglik).epsilon(1e-9));
  for (Eigen::Index j = 0; j < fa.beta.size(); ++j)
    CHECK(fa.beta[j] == doctest::Approx(fb.beta[j]).epsilon(1e-7));
}

TEST_CASE("scaling a predictor rescales its coefficient only") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(2);
  beta << 0.3, -0.2;
  RegressionDesign d = gen_armax_series(beta, 0.5, 0.4, -0.1, 0.2, 1.0, 10, 60, 37, truth);
  const ArmaxFit base = fit_armax(d);
  const double c = 40.0;
  for (DesignSegment& seg : d.segments) seg.x.col(1) *= c;
  const ArmaxFit scaled = fit_armax(d);
  CHECK(scaled.beta[1] == doctest::Approx(base.beta[1] / c).epsilon(1e-5));
  CHECK(scaled.beta[2] == doctest::Approx(base.beta[2]).epsilon(1e-5));
  CHECK(scaled.loglik == doctest::Approx(base.loglik).epsilon(1e-6));
}

TEST_CASE("too few observations per parameter rejected") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(1);
  beta << 0.1;
  const RegressionDesign d = gen_armax_series(beta, 0.0, 0.0, 0.0, 0.0, 1.0, 1, 30, 1, truth);
  CHECK_THROWS_AS(fit_armax(d), DataError);
}

TEST_CASE("diagnostics: correctly specified model passes Ljung-Box") {
  ArmaxTruth truth;
  Eigen::VectorXd beta(2);
  beta << 0.3, 0.1;
  const RegressionDesign d = gen_armax_series(beta, 0.2, 0.5, -0.2, 0.3, 1.0, 40, 60, 41, truth);
  const ArmaxFit fit = fit_armax(d);
  const ResidualDiagnostics diag = diagnostics(fit, d);
  REQUIRE(diag.acf.size() == 20);
  REQUIRE(diag.pacf.size() == 20);
  int outside = 0;
  for (double a : diag.acf)
    if (std::abs(a) > diag.band) ++outside;
  CHECK(outside <= 3);
  CHECK(diag.ljung_box_pvalue > 0.01);

  // Deliberately ignoring the AR structure leaves autocorrelation behind.
  ArmaxFit misfit = fit;
  misfit.phi1 = misfit.phi2 = misfit.psi = 0.0;
  const Eigen::Index n = d.n_obs();
  Eigen::MatrixXd X(n, 3);
  Eigen::VectorXd y(n);
  Eigen::Index row = 0;
  for (const DesignSegment& seg : d.segments) {
    X.middleRows(row, seg.y.size()) = seg.x;
    y.segment(row, seg.y.size()) = seg.y;
    row += seg.y.size();
  }
  misfit.beta = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  misfit.sigma2 = (y - X * misfit.beta).squaredNorm() / static_cast<double>(n);
  const ResidualDiagnostics bad = diagnostics(misfit, d);
  CHECK(bad.ljung_box_pvalue < 0.01);
  CHECK(bad.ljung_box > diag.ljung_box);
}
