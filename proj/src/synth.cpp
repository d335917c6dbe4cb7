#include "taglife/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "taglife/errors.hpp"

namespace taglife {

namespace {

double logistic_cum(double L, double k, double mid, double m) {
  return L / (1.0 + std::exp(-k * (m - mid)));
}

std::int64_t pareto_followers(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1e-12, 1.0);
  const double f = 10.0 * std::pow(u(rng), -1.0 / 1.16);
  return static_cast<std::int64_t>(std::min(f, 1e7));
}

long sample_count(std::mt19937_64& rng, bool noise, double mean_lo, double mean_hi) {
  if (noise) {
    const double mu = mean_hi - mean_lo;
    if (mu <= 0.0) return 0;
    std::poisson_distribution<long> pois(mu);
    return pois(rng);
  }
  return static_cast<long>(std::llround(mean_hi)) - static_cast<long>(std::llround(mean_lo));
}

}  // namespace

double PlantedArchetype::cumulative(double m) const {
  switch (kind) {
    case Kind::Logistic:
      return logistic_cum(L, k, midpoint, m);
    case Kind::Flat:
      return flat_rate * std::max(0.0, m);
    case Kind::Burst:
      return m > burst_minute ? static_cast<double>(burst_size) : 0.0;
  }
  return 0.0;
}

namespace {

// First tracked minute whose rounded cumulative increment is nonzero.
int archetype_onset(const PlantedArchetype& a, int horizon) {
  for (int m = 0; m < horizon; ++m) {
    if (std::llround(a.cumulative(m + 1)) >= 1) return m;
  }
  return horizon;
}

struct TagState {
  std::vector<std::string> users;           // user ids, fixed pool
  std::vector<std::int64_t> followers;
  std::vector<std::string> originals_ready; // original event ids from earlier minutes
  std::vector<std::string> originals_new;   // this minute's originals
  long emitted = 0;
};

}  // namespace

Scenario gen_debate_scenario(const ScenarioSpec& spec) {
  spec.episode.validate();
  const int tracking_min = spec.episode.tracking_minutes();
  const int lookback_min = spec.episode.lookback_hours * 60;
  const int peak_min = spec.episode.peak_duration_min;

  for (const PlantedTag& tag : spec.tags) {
    if (tag.pre_existing) continue;
    const int onset = archetype_onset(tag.archetype, tracking_min);
    if (onset >= peak_min)
      throw UsageError("infeasible scenario: tag '" + tag.name +
                       "' never emits inside the peak window");
    const double expected = tag.archetype.cumulative(tracking_min);
    if (tag.n_users >= spec.episode.min_users && expected < 1.25 * tag.n_users)
      throw UsageError("infeasible scenario: tag '" + tag.name +
                       "' cannot reliably reach its user pool (min_users above emission volume)");
  }

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<int> second(0, 59);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<TagState> states(spec.tags.size());
  for (std::size_t i = 0; i < spec.tags.size(); ++i) {
    const PlantedTag& tag = spec.tags[i];
    for (int u = 0; u < tag.n_users; ++u) {
      states[i].users.push_back(tag.name + "_u" + std::to_string(u));
      states[i].followers.push_back(pareto_followers(rng));
    }
  }
  const int n_bg_users = 600;
  std::vector<std::int64_t> bg_followers;
  for (int u = 0; u < n_bg_users; ++u) bg_followers.push_back(pareto_followers(rng));
  std::vector<std::string> bg_originals_ready, bg_originals_new;

  Scenario out;
  out.spec = spec;
  GroundTruth& truth = out.truth;
  std::vector<TweetEvent>& events = out.stream.events;
  long id_counter = 0;
  auto next_id = [&]() {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "e%09ld", id_counter++);
    return std::string(buf);
  };

  for (int m = -lookback_min; m < tracking_min; ++m) {
    const bool tracked = m >= 0;

    // Background chatter (no hashtags): feeds the environmental counts.
    if (spec.background_rate_per_min > 0.0) {
      const long count = sample_count(rng, spec.noise,
                                      spec.background_rate_per_min * (m + lookback_min),
                                      spec.background_rate_per_min * (m + lookback_min + 1));
      for (long j = 0; j < count; ++j) {
        TweetEvent ev;
        ev.event_id = next_id();
        ev.timestamp = spec.episode.event_start + 60LL * m + second(rng);
        const int u = static_cast<int>(unif(rng) * n_bg_users) % n_bg_users;
        ev.user_id = "bg_u" + std::to_string(u);
        ev.follower_count = bg_followers[static_cast<std::size_t>(u)];
        ev.text = "just settling in for the evening";
        const double roll = unif(rng);
        if (roll < spec.background_rt_fraction && !bg_originals_ready.empty()) {
          ev.retweet_of = bg_originals_ready[static_cast<std::size_t>(
              unif(rng) * static_cast<double>(bg_originals_ready.size()))];
          if (tracked) ++truth.total_minute[m].rt;
        } else if (roll < spec.background_rt_fraction + spec.background_rp_fraction) {
          ev.reply_to = "bg_u" + std::to_string(static_cast<int>(unif(rng) * n_bg_users) % n_bg_users);
          if (tracked) ++truth.total_minute[m].rp;
        } else {
          bg_originals_new.push_back(ev.event_id);
        }
        if (tracked) ++truth.total_minute[m].y;
        events.push_back(std::move(ev));
      }
    }

    for (std::size_t i = 0; i < spec.tags.size(); ++i) {
      const PlantedTag& tag = spec.tags[i];
      TagState& st = states[i];
      long count = 0;
      if (tag.pre_existing) {
        const double idx = static_cast<double>(m + lookback_min);
        count = sample_count(rng, spec.noise, tag.archetype.flat_rate * idx,
                             tag.archetype.flat_rate * (idx + 1.0));
      } else if (tracked) {
        count = sample_count(rng, spec.noise, tag.archetype.cumulative(m),
                             tag.archetype.cumulative(m + 1));
        if (st.emitted == 0 && count == 0 && m == archetype_onset(tag.archetype, tracking_min))
          count = 1;  // guarantee the planted onset
      }
      for (long j = 0; j < count; ++j) {
        TweetEvent ev;
        ev.event_id = next_id();
        ev.timestamp = spec.episode.event_start + 60LL * m + second(rng);
        const std::size_t pool = st.users.size();
        const std::size_t u =
            st.emitted < static_cast<long>(pool)
                ? static_cast<std::size_t>(st.emitted)
                : static_cast<std::size_t>(unif(rng) * static_cast<double>(pool)) % pool;
        ev.user_id = st.users[u];
        ev.follower_count = st.followers[u];
        ev.hashtags = {tag.name};
        ev.text = tag.relevant ? "everyone watching the debate tonight #" + tag.name
                               : "so much going on right now #" + tag.name;
        const double roll = unif(rng);
        if (st.emitted > 0 && roll < tag.rt_fraction && !st.originals_ready.empty()) {
          // Bias retweets toward early originals for interesting src dynamics.
          const double b = unif(rng);
          const std::size_t idx = static_cast<std::size_t>(
              b * b * static_cast<double>(st.originals_ready.size()));
          ev.retweet_of = st.originals_ready[std::min(idx, st.originals_ready.size() - 1)];
          ev.text = "RT " + ev.text;
          if (tracked) {
            ++truth.tag_minute[tag.name][m].rt;
            ++truth.total_minute[m].rt;
          }
        } else if (st.emitted > 0 && roll < tag.rt_fraction + tag.rp_fraction) {
          const std::size_t ru =
              static_cast<std::size_t>(unif(rng) * static_cast<double>(pool)) % pool;
          ev.reply_to = st.users[ru];
          if (tracked) {
            ++truth.tag_minute[tag.name][m].rp;
            ++truth.total_minute[m].rp;
          }
        } else {
          st.originals_new.push_back(ev.event_id);
        }
        if (tracked) {
          ++truth.tag_minute[tag.name][m].y;
          ++truth.total_minute[m].y;
          ++truth.tracked_events[tag.name];
        }
        ++st.emitted;
        events.push_back(std::move(ev));
      }
    }

    // Same-minute originals become retweetable next minute, keeping
    // retweet sources strictly earlier in time.
    for (TagState& st : states) {
      st.originals_ready.insert(st.originals_ready.end(), st.originals_new.begin(),
                                st.originals_new.end());
      st.originals_new.clear();
    }
    bg_originals_ready.insert(bg_originals_ready.end(), bg_originals_new.begin(),
                              bg_originals_new.end());
    bg_originals_new.clear();
  }

  std::stable_sort(events.begin(), events.end(), [](const TweetEvent& a, const TweetEvent& b) {
    if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
    return a.event_id < b.event_id;
  });

  for (const PlantedTag& tag : spec.tags) {
    if (tag.pre_existing) continue;
    truth.novel.push_back(tag.name);
    if (tag.n_users >= spec.episode.min_users) {
      truth.pop.push_back(tag.name);
      if (tag.relevant) truth.relevant.push_back(tag.name);
    }
    if (tag.archetype.kind == PlantedArchetype::Kind::Logistic) {
      truth.analytic_growth[tag.name] = tag.archetype.L * tag.archetype.k / 4.0;
      truth.analytic_te[tag.name] = tag.archetype.midpoint + std::log(99.0) / tag.archetype.k;
    }
    if (tag.winner) truth.planted_winners.insert(tag.name);
  }
  std::sort(truth.novel.begin(), truth.novel.end());
  std::sort(truth.pop.begin(), truth.pop.end());
  std::sort(truth.relevant.begin(), truth.relevant.end());
  return out;
}

namespace {

PlantedTag logistic_tag(const std::string& name, double L, double k, bool relevant, bool winner,
                        int n_users, double rt_frac, double rp_frac) {
  PlantedTag t;
  t.name = name;
  t.archetype.kind = PlantedArchetype::Kind::Logistic;
  t.archetype.L = L;
  t.archetype.k = k;
  // Low enough that the curve starts from ~zero, early enough that the
  // onset lands inside the two-hour peak window.
  t.archetype.midpoint = std::ceil(std::log(2.0 * L) / k) + 10.0;
  t.relevant = relevant;
  t.winner = winner;
  t.n_users = n_users;
  t.rt_fraction = rt_frac;
  t.rp_fraction = rp_frac;
  return t;
}

}  // namespace

ScenarioSpec detection_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.episode.episode_id = "deb1";
  spec.episode.event_start = 1349312400;  // arbitrary evening anchor
  spec.episode.keywords = {"debate", "president", "obama", "romney"};
  spec.background_rate_per_min = 8.0;

  // 3 winners + 7 also-rans, all relevant pop.
  spec.tags.push_back(logistic_tag("bigbirdgate", 9000, 0.012, true, true, 180, 0.45, 0.18));
  spec.tags.push_back(logistic_tag("bindersjokes", 7000, 0.010, true, true, 170, 0.40, 0.22));
  spec.tags.push_back(logistic_tag("malarkeyfest", 6000, 0.013, true, true, 160, 0.42, 0.20));
  spec.tags.push_back(logistic_tag("sesamecuts", 900, 0.07, true, false, 140, 0.30, 0.25));
  spec.tags.push_back(logistic_tag("pbsfunding", 800, 0.08, true, false, 130, 0.28, 0.26));
  spec.tags.push_back(logistic_tag("lehrermod", 700, 0.09, true, false, 120, 0.32, 0.22));
  spec.tags.push_back(logistic_tag("mittzingers", 1100, 0.06, true, false, 150, 0.30, 0.24));
  spec.tags.push_back(logistic_tag("baracksnooze", 650, 0.10, true, false, 115, 0.27, 0.28));
  spec.tags.push_back(logistic_tag("swingstatey", 950, 0.07, true, false, 135, 0.31, 0.21));
  spec.tags.push_back(logistic_tag("townhallvibes", 850, 0.08, true, false, 125, 0.29, 0.23));
  // 2 pop but off-topic.
  spec.tags.push_back(logistic_tag("nflkickoff", 700, 0.08, false, false, 120, 0.30, 0.20));
  spec.tags.push_back(logistic_tag("catpicsnow", 600, 0.09, false, false, 110, 0.25, 0.25));
  // 11 novel tags that never clear the unique-user threshold.
  const char* small_names[] = {"weeknightwit", "sofasnark",    "quipfest",   "zingerzone",
                               "couchtakes",   "midweekmood",  "snarkhour",  "tvnight",
                               "hotmicmoment", "watchparty",   "livereacts"};
  for (const char* name : small_names)
    spec.tags.push_back(logistic_tag(name, 170, 0.09, false, false, 60, 0.2, 0.2));
  // 4 pre-existing decoys active through the lookback and the peak.
  for (const char* name : {"mondaymotivation", "nowplaying", "followfriday", "gameday"}) {
    PlantedTag t;
    t.name = name;
    t.archetype.kind = PlantedArchetype::Kind::Flat;
    t.archetype.flat_rate = 0.6;
    t.pre_existing = true;
    t.n_users = 80;
    t.rt_fraction = 0.25;
    t.rp_fraction = 0.2;
    spec.tags.push_back(std::move(t));
  }
  return spec;
}

ScenarioSpec standard_scenario(std::uint64_t seed) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.episode.episode_id = "deb1";
  spec.episode.event_start = 1349312400;
  spec.episode.keywords = {"debate", "president", "obama", "romney"};
  spec.background_rate_per_min = 6.0;

  for (int i = 0; i < 12; ++i) {
    const double L = 5200.0 + 640.0 * i;
    const double k = 0.009 + 0.0006 * (i % 5);
    spec.tags.push_back(logistic_tag("winnertag" + std::to_string(i), L, k, true, true,
                                     150 + 10 * i, 0.40 + 0.01 * (i % 4), 0.20));
  }
  for (int i = 0; i < 28; ++i) {
    const double L = 420.0 + 40.0 * i;
    const double k = 0.05 + 0.003 * (i % 8);
    spec.tags.push_back(logistic_tag("alsotag" + std::to_string(i), L, k, true, false,
                                     100 + 3 * i, 0.28 + 0.005 * (i % 6), 0.24));
  }
  for (int i = 0; i < 5; ++i)
    spec.tags.push_back(logistic_tag("quiet" + std::to_string(i), 170, 0.09, false, false, 60,
                                     0.2, 0.2));
  for (const char* name : {"nowplaying", "gameday"}) {
    PlantedTag t;
    t.name = name;
    t.archetype.kind = PlantedArchetype::Kind::Flat;
    t.archetype.flat_rate = 0.5;
    t.pre_existing = true;
    t.n_users = 80;
    t.rt_fraction = 0.25;
    t.rp_fraction = 0.2;
    spec.tags.push_back(std::move(t));
  }
  return spec;
}

HashtagEpisode gen_logistic_stream(double L, double k, double midpoint, int total_minutes,
                                   std::uint64_t seed, bool noise, LogisticStreamTruth& truth) {
  if (L < 1.0 || k <= 0.0) throw UsageError("gen_logistic_stream: need L >= 1 and k > 0");
  truth.growth = L * k / 4.0;
  truth.t_e = midpoint + std::log(99.0) / k;

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> second(0, 59);
  HashtagEpisode ep;
  ep.tag = "x";
  ep.episode_id = "synthetic";
  ep.event_start = 0;
  ep.tracking_minutes = total_minutes;
  long id_counter = 0;
  auto emit = [&](std::int64_t timestamp) {
    TweetEvent ev;
    ev.event_id = "e" + std::to_string(id_counter);
    ev.timestamp = timestamp;
    ev.user_id = "u" + std::to_string(id_counter);
    ev.text = "#x";
    ev.hashtags = {"x"};
    ++id_counter;
    ep.events.push_back(std::move(ev));
  };
  if (noise) {
    for (int m = 0; m < total_minutes; ++m) {
      const long count = sample_count(rng, noise, logistic_cum(L, k, midpoint, m),
                                      logistic_cum(L, k, midpoint, m + 1));
      for (long j = 0; j < count; ++j) emit(60LL * m + second(rng));
    }
  } else {
    // Noise-free: event c at the exact quantile time Lambda^{-1}(c), so the
    // cumulative count at any minute is floor(Lambda) with no rounding bias
    // in the saturation crossing. The asymptotic final event uses c = L-1/2.
    auto quantile_minute = [&](double c) { return midpoint + std::log(c / (L - c)) / k; };
    for (double c = 1.0; c <= L - 0.75; c += 1.0) {
      const double t = quantile_minute(c);
      if (t < 0.0 || t >= static_cast<double>(total_minutes)) continue;
      emit(static_cast<std::int64_t>(std::floor(60.0 * t)));
    }
    const double t_last = quantile_minute(L - 0.5);
    if (t_last >= 0.0 && t_last < static_cast<double>(total_minutes))
      emit(static_cast<std::int64_t>(std::floor(60.0 * t_last)));
  }
  if (ep.events.empty()) {
    TweetEvent ev;
    ev.event_id = "e0";
    ev.timestamp = 60LL * static_cast<std::int64_t>(midpoint);
    ev.user_id = "u0";
    ev.text = "#x";
    ev.hashtags = {"x"};
    ep.events.push_back(std::move(ev));
  }
  std::stable_sort(ep.events.begin(), ep.events.end(),
                   [](const TweetEvent& a, const TweetEvent& b) {
                     if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
                     return a.event_id < b.event_id;
                   });
  ep.t0 = ep.events.front().timestamp;
  return ep;
}

RegressionDesign gen_armax_series(const Eigen::VectorXd& predictor_beta, double intercept,
                                  double phi1, double phi2, double psi, double sigma2,
                                  int n_segments, int segment_length, std::uint64_t seed,
                                  ArmaxTruth& truth) {
  if (std::abs(phi2) >= 1.0 || std::abs(phi1) >= 1.0 - phi2 || phi2 - std::abs(phi1) >= 1.0 ||
      phi1 + phi2 >= 1.0 || phi2 - phi1 >= 1.0)
    throw UsageError("gen_armax_series: AR parameters outside the stationary region");
  if (std::abs(psi) >= 1.0)
    throw UsageError("gen_armax_series: MA parameter outside the invertible region");

  const Eigen::Index kx = predictor_beta.size();
  truth.beta.resize(kx + 1);
  truth.beta[0] = intercept;
  truth.beta.tail(kx) = predictor_beta;
  truth.phi1 = phi1;
  truth.phi2 = phi2;
  truth.psi = psi;
  truth.sigma2 = sigma2;

  // Stationary state covariance (unit innovations), for exact cold starts.
  Eigen::Matrix3d A;
  A << 1.0 - phi1 * phi1, -2.0 * phi1, -1.0,
       -phi1 * phi2, 1.0 - phi2, 0.0,
       -phi2 * phi2, 0.0, 1.0;
  Eigen::Vector3d rhs(1.0, psi, psi * psi);
  const Eigen::Vector3d s = A.colPivHouseholderQr().solve(rhs);
  Eigen::Matrix2d P0;
  P0 << s[0], s[1], s[1], s[2];
  const Eigen::Matrix2d chol = (sigma2 * P0).llt().matrixL();

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  RegressionDesign design;
  design.predictor_names = {"intercept"};
  for (Eigen::Index j = 0; j < kx; ++j) design.predictor_names.push_back("x" + std::to_string(j + 1));

  Eigen::Matrix2d T;
  T << phi1, 1.0, phi2, 0.0;
  Eigen::Vector2d R(1.0, psi);
  const double sd = std::sqrt(sigma2);

  for (int segi = 0; segi < n_segments; ++segi) {
    DesignSegment seg;
    seg.tag = "sim" + std::to_string(segi);
    seg.y.resize(segment_length);
    seg.x.resize(segment_length, kx + 1);

    // Positive-valued AR(1) predictors, stationary start.
    Eigen::VectorXd xprev(kx);
    for (Eigen::Index j = 0; j < kx; ++j) xprev[j] = 1.0 + std::abs(gauss(rng));
    Eigen::Vector2d alpha = chol * Eigen::Vector2d(gauss(rng), gauss(rng));
    for (int t = 0; t < segment_length; ++t) {
      seg.x(t, 0) = 1.0;
      for (Eigen::Index j = 0; j < kx; ++j) {
        xprev[j] = 0.4 + 0.6 * xprev[j] + 0.5 * std::abs(gauss(rng));
        seg.x(t, j + 1) = xprev[j];
      }
      seg.y[t] = truth.beta.dot(seg.x.row(t)) + alpha[0];
      alpha = T * alpha + R * (sd * gauss(rng));
    }
    design.segments.push_back(std::move(seg));
  }
  return design;
}

std::vector<SurvivalRecord> gen_survival_cohort(const Eigen::VectorXd& beta, double baseline_rate,
                                                int n, double censor_time, std::uint64_t seed,
                                                SurvivalTruth& truth) {
  if (baseline_rate <= 0.0) throw UsageError("gen_survival_cohort: rate must be positive");
  if (n < 2) throw UsageError("gen_survival_cohort: need n >= 2");
  truth.beta = beta;
  truth.baseline_rate = baseline_rate;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(1e-12, 1.0);
  // Stratified inverse-CDF draws per group: each subject consumes one
  // quantile of an evenly spaced grid (shuffled within its group), so the
  // planted group hazards are realized with minimal Monte-Carlo noise
  // while marginals stay exponential.
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int parity = 0; parity < 2; ++parity) {
    const int m = n / 2 + (n % 2 && parity == 0 ? 1 : 0);
    std::vector<double> g(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j)
      g[static_cast<std::size_t>(j)] = (static_cast<double>(j) + 0.5) / static_cast<double>(m);
    std::shuffle(g.begin(), g.end(), rng);
    int j = 0;
    for (int i = parity; i < n; i += 2) grid[static_cast<std::size_t>(i)] = g[static_cast<std::size_t>(j++)];
  }
  std::vector<SurvivalRecord> records;
  records.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    SurvivalRecord rec;
    rec.tag = "subj" + std::to_string(i);
    rec.covariates.resize(static_cast<std::size_t>(beta.size()));
    rec.covariates[0] = static_cast<double>(i % 2);  // balanced binary group
    for (Eigen::Index j = 1; j < beta.size(); ++j)
      rec.covariates[static_cast<std::size_t>(j)] = unif(rng);
    double eta = 0.0;
    for (Eigen::Index j = 0; j < beta.size(); ++j)
      eta += beta[j] * rec.covariates[static_cast<std::size_t>(j)];
    const double t =
        -std::log(grid[static_cast<std::size_t>(i)]) / (baseline_rate * std::exp(eta));
    if (t > censor_time) {
      rec.duration = censor_time;
      rec.event = 0;
    } else {
      rec.duration = t;
      rec.event = 1;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace taglife
