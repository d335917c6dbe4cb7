#include "taglife/survival.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "taglife/errors.hpp"

namespace taglife {

const std::vector<std::string> kSurvivalCovariateNames = {"rt_alpha", "rp_alpha", "src_alpha",
                                                          "follow_alpha"};

namespace {

struct Interval {
  double entry = 0.0;  // at risk on (entry, exit]
  double exit = 0.0;
  int event = 0;
  Eigen::VectorXd x;
};

struct EfronState {
  double loglik = 0.0;
  Eigen::VectorXd score;
  Eigen::MatrixXd info;
};

EfronState efron_pass(const std::vector<Interval>& data, const Eigen::VectorXd& beta) {
  const Eigen::Index k = beta.size();
  const std::size_t n = data.size();
  EfronState st;
  st.score = Eigen::VectorXd::Zero(k);
  st.info = Eigen::MatrixXd::Zero(k, k);

  std::set<double> event_times;
  for (const Interval& iv : data)
    if (iv.event) event_times.insert(iv.exit);

  std::vector<double> eta(n);
  for (std::size_t i = 0; i < n; ++i) eta[i] = beta.dot(data[i].x);

  // Sweep event times in decreasing order keeping running risk-set sums:
  // an interval joins once t drops to its exit and leaves once t drops to
  // its entry, so each interval is touched O(1) times per pass.
  std::vector<std::size_t> by_exit(n), by_entry(n);
  for (std::size_t i = 0; i < n; ++i) by_exit[i] = by_entry[i] = i;
  std::sort(by_exit.begin(), by_exit.end(),
            [&](std::size_t a, std::size_t b) { return data[a].exit > data[b].exit; });
  std::sort(by_entry.begin(), by_entry.end(),
            [&](std::size_t a, std::size_t b) { return data[a].entry > data[b].entry; });

  double s0 = 0.0;
  Eigen::VectorXd s1 = Eigen::VectorXd::Zero(k);
  Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(k, k);
  std::size_t add_next = 0, drop_next = 0;

  for (auto it = event_times.rbegin(); it != event_times.rend(); ++it) {
    const double t = *it;
    double s0d = 0.0;
    Eigen::VectorXd s1d = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd s2d = Eigen::MatrixXd::Zero(k, k);
    int d = 0;
    const std::size_t add_begin = add_next;
    while (add_next < n && data[by_exit[add_next]].exit >= t) {
      const Interval& iv = data[by_exit[add_next]];
      const double w = std::exp(eta[by_exit[add_next]]);
      s0 += w;
      s1.noalias() += w * iv.x;
      s2.noalias() += w * iv.x * iv.x.transpose();
      ++add_next;
    }
    while (drop_next < n && data[by_entry[drop_next]].entry >= t) {
      const Interval& iv = data[by_entry[drop_next]];
      const double w = std::exp(eta[by_entry[drop_next]]);
      s0 -= w;
      s1.noalias() -= w * iv.x;
      s2.noalias() -= w * iv.x * iv.x.transpose();
      ++drop_next;
    }
    // Event intervals with exit == t sit at the tail of the slice the add
    // loop just consumed (by_exit is sorted by decreasing exit).
    for (std::size_t p = add_begin; p < add_next; ++p) {
      const std::size_t i = by_exit[p];
      const Interval& iv = data[i];
      if (!(iv.event && iv.exit == t)) continue;
      const double w = std::exp(eta[i]);
      ++d;
      s0d += w;
      s1d.noalias() += w * iv.x;
      s2d.noalias() += w * iv.x * iv.x.transpose();
      st.loglik += eta[i];
      st.score += iv.x;
    }
    for (int l = 0; l < d; ++l) {
      const double frac = static_cast<double>(l) / static_cast<double>(d);
      const double denom = s0 - frac * s0d;
      const Eigen::VectorXd num = s1 - frac * s1d;
      const Eigen::MatrixXd num2 = s2 - frac * s2d;
      st.loglik -= std::log(denom);
      st.score -= num / denom;
      st.info += num2 / denom - (num / denom) * (num / denom).transpose();
    }
  }
  return st;
}

CoxFit newton_fit(std::vector<Interval> data, std::vector<std::string> names,
                  std::size_t n_subjects) {
  CoxFit fit;
  fit.n_subjects = n_subjects;
  for (const Interval& iv : data) fit.n_events += static_cast<std::size_t>(iv.event);
  if (fit.n_events < 2) throw DataError("fit_cox: need at least 2 events");

  // Drop constant covariate columns.
  const Eigen::Index k_all = data.front().x.size();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < k_all; ++j) {
    const double first = data.front().x[j];
    bool constant = true;
    for (const Interval& iv : data)
      if (iv.x[j] != first) {
        constant = false;
        break;
      }
    if (constant)
      fit.dropped_covariates.push_back(names[static_cast<std::size_t>(j)]);
    else
      keep.push_back(j);
  }
  if (keep.empty()) {
    // Null model: every covariate constant, beta has no free coordinates.
    for (Interval& iv : data) iv.x = Eigen::VectorXd::Zero(0);
    const EfronState null_st = efron_pass(data, Eigen::VectorXd::Zero(0));
    fit.beta = Eigen::VectorXd::Zero(0);
    fit.se = Eigen::VectorXd::Zero(0);
    fit.hazard_ratio = Eigen::VectorXd::Zero(0);
    fit.loglik = fit.null_loglik = null_st.loglik;
    fit.aic = -2.0 * null_st.loglik;
    return fit;
  }
  if (!fit.dropped_covariates.empty()) {
    for (Interval& iv : data) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(keep.size()));
      for (std::size_t j = 0; j < keep.size(); ++j) x[static_cast<Eigen::Index>(j)] = iv.x[keep[j]];
      iv.x = std::move(x);
    }
    std::vector<std::string> kept_names;
    for (Eigen::Index j : keep) kept_names.push_back(names[static_cast<std::size_t>(j)]);
    names = std::move(kept_names);
  }
  fit.covariate_names = names;
  const Eigen::Index k = static_cast<Eigen::Index>(keep.size());

  // The partial likelihood is invariant to covariate location shifts;
  // centering keeps exp(beta'x) in range for large-valued covariates.
  Eigen::VectorXd center = Eigen::VectorXd::Zero(k);
  for (const Interval& iv : data) center += iv.x;
  center /= static_cast<double>(data.size());
  for (Interval& iv : data) iv.x -= center;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(k);
  EfronState st = efron_pass(data, beta);
  fit.null_loglik = st.loglik;
  double loglik = st.loglik;

  for (int iter = 0; iter < 100; ++iter) {
    if (st.score.lpNorm<Eigen::Infinity>() < 1e-9) break;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(st.info);
    if (ldlt.info() != Eigen::Success) {
      fit.diverged = true;
      break;
    }
    Eigen::VectorXd step = ldlt.solve(st.score);
    double scale = 1.0;
    Eigen::VectorXd beta_new;
    EfronState st_new;
    bool ok = false;
    for (int half = 0; half < 30; ++half) {
      beta_new = beta + scale * step;
      st_new = efron_pass(data, beta_new);
      if (std::isfinite(st_new.loglik) && st_new.loglik >= loglik - 1e-12) {
        ok = true;
        break;
      }
      scale *= 0.5;
    }
    if (!ok) break;
    beta = beta_new;
    loglik = st_new.loglik;
    st = std::move(st_new);
    if (beta.lpNorm<Eigen::Infinity>() > 15.0) {
      fit.diverged = true;  // monotone likelihood / perfect separation
      break;
    }
  }
  if (beta.lpNorm<Eigen::Infinity>() > 15.0) fit.diverged = true;

  fit.beta = beta;
  fit.loglik = loglik;
  fit.score_max_norm = st.score.lpNorm<Eigen::Infinity>();
  fit.aic = 2.0 * static_cast<double>(k) - 2.0 * loglik;
  fit.hazard_ratio = beta.array().exp();
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(st.info);
  fit.se.resize(k);
  if (ldlt.info() == Eigen::Success) {
    const Eigen::MatrixXd cov = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    for (Eigen::Index j = 0; j < k; ++j)
      fit.se[j] = cov(j, j) > 0.0 ? std::sqrt(cov(j, j)) : std::numeric_limits<double>::quiet_NaN();
  } else {
    fit.se.setConstant(std::numeric_limits<double>::quiet_NaN());
  }
  return fit;
}

}  // namespace

std::vector<SurvivalRecord> build_records(const std::map<std::string, TagSeries>& series,
                                          const std::vector<ClassAssignment>& assignments,
                                          TagClass cls) {
  std::vector<SurvivalRecord> records;
  for (const ClassAssignment& a : assignments) {
    if (a.cls != cls) continue;
    const auto it = series.find(a.tag);
    if (it == series.end()) throw DataError("build_records: no series for tag '" + a.tag + "'");
    const TagSeries& ts = it->second;
    const CurveSummary& cs = ts.summary;
    SurvivalRecord rec;
    rec.tag = a.tag;
    rec.duration = static_cast<double>(cs.t_e - cs.t_star);
    rec.event = 1;  // t_e always realized inside the tracking window
    const AggregateVibrancy agg = aggregate_at(ts.frames, cs.t_star);
    rec.covariates = {agg.rt_alpha, agg.rp_alpha, agg.src_alpha, agg.follow_alpha};
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<CountingProcessRow> build_counting_rows(
    const std::map<std::string, TagSeries>& series,
    const std::vector<ClassAssignment>& assignments, TagClass cls) {
  std::vector<CountingProcessRow> rows;
  for (const ClassAssignment& a : assignments) {
    if (a.cls != cls) continue;
    const TagSeries& ts = series.at(a.tag);
    const CurveSummary& cs = ts.summary;
    const int duration = cs.t_e - cs.t_star;
    if (duration <= 0 || ts.env.empty()) continue;
    const AggregateVibrancy agg = aggregate_at(ts.frames, cs.t_star);
    const int first = ts.frames.front().minute;
    for (int j = 0; j < duration; ++j) {
      CountingProcessRow row;
      row.tag = a.tag;
      row.start = static_cast<double>(j);
      row.stop = static_cast<double>(j + 1);
      row.event = (j == duration - 1) ? 1 : 0;
      const EnvFrame& env = ts.env[static_cast<std::size_t>(cs.t_star + j - first)];
      row.covariates = {agg.rt_alpha,
                        agg.rp_alpha,
                        agg.src_alpha,
                        agg.follow_alpha,
                        static_cast<double>(env.rt_env),
                        static_cast<double>(env.rp_env),
                        static_cast<double>(env.src_env_alpha)};
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

CoxFit fit_cox(const std::vector<SurvivalRecord>& records, const std::vector<std::string>& names) {
  if (records.empty()) throw DataError("fit_cox: empty cohort");
  std::vector<Interval> data;
  data.reserve(records.size());
  for (const SurvivalRecord& r : records) {
    Interval iv;
    iv.entry = -1.0;  // at risk from time 0 onward, zero durations included
    iv.exit = r.duration;
    iv.event = r.event;
    iv.x = Eigen::Map<const Eigen::VectorXd>(r.covariates.data(),
                                             static_cast<Eigen::Index>(r.covariates.size()));
    data.push_back(std::move(iv));
  }
  return newton_fit(std::move(data), names, records.size());
}

CoxFit fit_cox(const std::vector<CountingProcessRow>& rows, const std::vector<std::string>& names) {
  if (rows.empty()) throw DataError("fit_cox: empty cohort");
  std::vector<Interval> data;
  data.reserve(rows.size());
  std::set<std::string> tags;
  for (const CountingProcessRow& r : rows) {
    if (!(r.stop > r.start))
      throw DataError("fit_cox: counting-process row with stop <= start for tag '" + r.tag + "'");
    tags.insert(r.tag);
    Interval iv;
    iv.entry = r.start;
    iv.exit = r.stop;
    iv.event = r.event;
    iv.x = Eigen::Map<const Eigen::VectorXd>(r.covariates.data(),
                                             static_cast<Eigen::Index>(r.covariates.size()));
    data.push_back(std::move(iv));
  }
  return newton_fit(std::move(data), names, tags.size());
}

double hazard_effect(const CoxFit& fit, const std::string& covariate, double delta) {
  for (std::size_t j = 0; j < fit.covariate_names.size(); ++j)
    if (fit.covariate_names[j] == covariate)
      return 100.0 * (std::exp(fit.beta[static_cast<Eigen::Index>(j)] * delta) - 1.0);
  throw UsageError("hazard_effect: unknown covariate '" + covariate + "'");
}

KMCurve km(const std::vector<SurvivalRecord>& records) {
  if (records.empty()) throw DataError("km: empty cohort");
  std::vector<std::pair<double, int>> obs;  // (time, event)
  obs.reserve(records.size());
  for (const SurvivalRecord& r : records) obs.emplace_back(r.duration, r.event);
  std::sort(obs.begin(), obs.end());

  KMCurve curve;
  double s = 1.0;
  double greenwood = 0.0;  // var(log S)
  std::size_t i = 0;
  const std::size_t n = obs.size();
  while (i < n) {
    const double t = obs[i].first;
    std::size_t d = 0, at_this_time = 0;
    while (i + at_this_time < n && obs[i + at_this_time].first == t) {
      d += static_cast<std::size_t>(obs[i + at_this_time].second);
      ++at_this_time;
    }
    const std::size_t risk = n - i;
    if (d > 0) {
      s *= 1.0 - static_cast<double>(d) / static_cast<double>(risk);
      if (risk > d)
        greenwood += static_cast<double>(d) /
                     (static_cast<double>(risk) * static_cast<double>(risk - d));
      curve.times.push_back(t);
      curve.survival.push_back(s);
      curve.at_risk.push_back(risk);
      curve.events.push_back(d);
      if (s > 0.0) {
        const double half_width = 1.959963984540054 * std::sqrt(greenwood);
        curve.lower.push_back(std::clamp(s * std::exp(-half_width), 0.0, 1.0));
        curve.upper.push_back(std::clamp(s * std::exp(half_width), 0.0, 1.0));
      } else {
        curve.lower.push_back(0.0);
        curve.upper.push_back(0.0);
      }
    }
    i += at_this_time;
  }
  return curve;
}

std::optional<double> median_survival(const KMCurve& curve) {
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    if (curve.survival[i] <= 0.5) return curve.times[i];
  return std::nullopt;
}

}  // namespace taglife
