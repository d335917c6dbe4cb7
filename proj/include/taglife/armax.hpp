#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "taglife/taxonomy.hpp"
#include "taglife/trajectory.hpp"
#include "taglife/vibrancy.hpp"

namespace taglife {

/// One hashtag's contiguous minute series over (t0, t*]. Predictor rows
/// are lag-1 aligned: row t uses frame values from minute t-1.
struct DesignSegment {
  std::string tag;
  Eigen::VectorXd y;  // log1p(new tweets)
  Eigen::MatrixXd x;  // intercept + predictors, one row per minute
};

struct RegressionDesign {
  std::vector<DesignSegment> segments;
  std::vector<std::string> predictor_names;  // includes "intercept"
  std::vector<std::string> excluded_tags;    // growth phase shorter than 5 minutes

  Eigen::Index n_obs() const;
  Eigen::Index n_predictors() const {
    return static_cast<Eigen::Index>(predictor_names.size());
  }
};

/// Regression with ARMA(2,1) errors, exact Gaussian MLE via state-space
/// innovations filtering. Filter re-initialized at each segment boundary.
struct ArmaxFit {
  std::vector<std::string> predictor_names;
  Eigen::VectorXd beta;
  Eigen::VectorXd beta_se;
  double phi1 = 0.0, phi2 = 0.0, psi = 0.0;
  double phi1_se = 0.0, phi2_se = 0.0, psi_se = 0.0;
  double sigma2 = 0.0;
  double loglik = 0.0;
  double start_loglik = 0.0;  // OLS / white-noise start
  double aic = 0.0;
  Eigen::Index n_obs = 0;
  bool se_flagged = false;  // singular observed information
  int iterations = 0;
};

struct ResidualDiagnostics {
  std::vector<double> acf;   // lags 1..20
  std::vector<double> pacf;  // lags 1..20
  double band = 0.0;         // +-2/sqrt(n)
  double ljung_box = 0.0;    // lag 10
  double ljung_box_pvalue = 1.0;
  Eigen::Index n = 0;
};

struct TagSeries {
  CurveSummary summary;
  std::vector<VibrancyFrame> frames;
  std::vector<EnvFrame> env;  // may be empty when with_env is off
};

constexpr int kMinSegmentMinutes = 5;

RegressionDesign build_design(const std::map<std::string, TagSeries>& series,
                              const std::vector<ClassAssignment>& assignments, TagClass cls,
                              bool with_env);

ArmaxFit fit_armax(const RegressionDesign& design);

ResidualDiagnostics diagnostics(const ArmaxFit& fit, const RegressionDesign& design);

/// Exact log-likelihood of the full parameter vector; exposed for tests.
double armax_loglik(const RegressionDesign& design, const Eigen::VectorXd& beta, double phi1,
                    double phi2, double psi, double sigma2);

}  // namespace taglife
