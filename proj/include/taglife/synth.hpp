#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "taglife/armax.hpp"
#include "taglife/episodes.hpp"
#include "taglife/events.hpp"
#include "taglife/survival.hpp"

namespace taglife {

struct PlantedArchetype {
  enum class Kind { Logistic, Flat, Burst };
  Kind kind = Kind::Logistic;
  double L = 0.0;         // logistic final size
  double k = 0.0;         // logistic rate per minute
  double midpoint = 0.0;  // minutes since event_start
  double flat_rate = 0.0; // events per minute (flat archetype)
  int burst_minute = 0;
  int burst_size = 0;

  /// Mean cumulative count at minute boundary m (minutes since event_start).
  double cumulative(double m) const;
};

struct PlantedTag {
  std::string name;
  PlantedArchetype archetype;
  double rt_fraction = 0.0;
  double rp_fraction = 0.0;
  int n_users = 150;
  bool pre_existing = false;  // also emits during the lookback interval
  bool relevant = false;      // tweet text carries an episode keyword
  bool winner = false;        // planted class label
};

struct ScenarioSpec {
  std::uint64_t seed = 1;
  EpisodeConfig episode;
  std::vector<PlantedTag> tags;
  bool noise = true;
  double background_rate_per_min = 0.0;  // untagged chatter for env counts
  double background_rt_fraction = 0.3;
  double background_rp_fraction = 0.2;
};

struct MinuteCounts {
  std::int64_t y = 0;
  std::int64_t rt = 0;
  std::int64_t rp = 0;
};

struct GroundTruth {
  std::vector<std::string> novel;     // sorted
  std::vector<std::string> pop;       // sorted
  std::vector<std::string> relevant;  // sorted
  std::map<std::string, std::map<int, MinuteCounts>> tag_minute;  // tracking window only
  std::map<std::string, std::int64_t> tracked_events;  // per tag
  std::map<int, MinuteCounts> total_minute;            // all events, tracking window
  std::map<std::string, double> analytic_growth;       // Lk/4 for logistic tags
  std::map<std::string, double> analytic_te;           // midpoint + ln(99)/k
  std::set<std::string> planted_winners;
};

struct Scenario {
  EventStream stream;
  GroundTruth truth;
  ScenarioSpec spec;
};

Scenario gen_debate_scenario(const ScenarioSpec& spec);

/// Fixed shape used by the detection acceptance criterion: 23 novel tags
/// (12 pop, 10 of those relevant) plus 4 pre-existing decoys.
ScenarioSpec detection_scenario(std::uint64_t seed);

/// Richer scenario for end-to-end pipeline runs: enough tags per class to
/// support the growth and persistence models.
ScenarioSpec standard_scenario(std::uint64_t seed);

struct LogisticStreamTruth {
  double growth = 0.0;  // Lk/4
  double t_e = 0.0;     // midpoint + ln(99)/k
};

HashtagEpisode gen_logistic_stream(double L, double k, double midpoint, int total_minutes,
                                   std::uint64_t seed, bool noise, LogisticStreamTruth& truth);

struct ArmaxTruth {
  Eigen::VectorXd beta;  // intercept first
  double phi1 = 0.0, phi2 = 0.0, psi = 0.0, sigma2 = 1.0;
};

RegressionDesign gen_armax_series(const Eigen::VectorXd& predictor_beta, double intercept,
                                  double phi1, double phi2, double psi, double sigma2,
                                  int n_segments, int segment_length, std::uint64_t seed,
                                  ArmaxTruth& truth);

struct SurvivalTruth {
  Eigen::VectorXd beta;
  double baseline_rate = 0.0;
};

/// First covariate is a balanced binary group indicator; the rest are
/// Uniform(0,1). Durations are exponential with rate
/// baseline_rate * exp(beta' x), censored at censor_time.
std::vector<SurvivalRecord> gen_survival_cohort(const Eigen::VectorXd& beta, double baseline_rate,
                                                int n, double censor_time, std::uint64_t seed,
                                                SurvivalTruth& truth);

}  // namespace taglife
