#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taglife/armax.hpp"
#include "taglife/taxonomy.hpp"

namespace taglife {

/// One hashtag's persistence observation: duration from t* to t_e with
/// vibrancy aggregates frozen at t*.
struct SurvivalRecord {
  std::string tag;
  double duration = 0.0;  // minutes
  int event = 1;          // 0 = administratively censored
  std::vector<double> covariates;
};

/// (start, stop] interval row for time-dependent covariates.
struct CountingProcessRow {
  std::string tag;
  double start = 0.0;
  double stop = 0.0;
  int event = 0;  // only the final row of an uncensored tag carries 1
  std::vector<double> covariates;
};

struct CoxFit {
  std::vector<std::string> covariate_names;
  Eigen::VectorXd beta;          // log hazard ratios
  Eigen::VectorXd se;            // not exponentiated
  Eigen::VectorXd hazard_ratio;  // exp(beta)
  double loglik = 0.0;           // partial
  double null_loglik = 0.0;
  double score_max_norm = 0.0;   // at the reported optimum
  double aic = 0.0;
  std::size_t n_subjects = 0;
  std::size_t n_events = 0;
  std::vector<std::string> dropped_covariates;  // constant columns
  bool diverged = false;
};

struct KMCurve {
  std::vector<double> times;      // distinct event times
  std::vector<double> survival;   // S(t) just after each event time
  std::vector<double> lower, upper;  // log-transformed 95% envelope
  std::vector<std::size_t> at_risk;
  std::vector<std::size_t> events;
};

extern const std::vector<std::string> kSurvivalCovariateNames;

std::vector<SurvivalRecord> build_records(const std::map<std::string, TagSeries>& series,
                                          const std::vector<ClassAssignment>& assignments,
                                          TagClass cls);

/// One row per minute at risk, fixed covariates plus environmental
/// counts for that minute.
std::vector<CountingProcessRow> build_counting_rows(
    const std::map<std::string, TagSeries>& series,
    const std::vector<ClassAssignment>& assignments, TagClass cls);

CoxFit fit_cox(const std::vector<SurvivalRecord>& records,
               const std::vector<std::string>& names = kSurvivalCovariateNames);
CoxFit fit_cox(const std::vector<CountingProcessRow>& rows,
               const std::vector<std::string>& names);

/// Percent change in the hazard for a `delta` increase of one covariate.
double hazard_effect(const CoxFit& fit, const std::string& covariate, double delta);

KMCurve km(const std::vector<SurvivalRecord>& records);

std::optional<double> median_survival(const KMCurve& curve);

}  // namespace taglife
