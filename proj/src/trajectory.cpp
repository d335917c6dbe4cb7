#include "taglife/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "taglife/errors.hpp"

namespace taglife {

CumulativeCurve make_curve(const std::vector<VibrancyFrame>& frames, int tracking_minutes) {
  CumulativeCurve curve;
  curve.counts.assign(static_cast<std::size_t>(tracking_minutes), 0.0);
  double total = 0.0;
  std::size_t fi = 0;
  for (int t = 0; t < tracking_minutes; ++t) {
    if (fi < frames.size() && frames[fi].minute == t) {
      total += static_cast<double>(frames[fi].y);
      if (frames[fi].y > 0) ++curve.support_minutes;
      ++fi;
    }
    curve.counts[static_cast<std::size_t>(t)] = total;
  }
  return curve;
}

SmoothingSpline fit_spline(const CumulativeCurve& curve) {
  if (curve.support_minutes < 4)
    throw DataError("degenerate curve: fewer than 4 minutes with data");
  std::vector<double> x(curve.counts.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
  // Cap the smoothing bandwidth by the curve's own central-rise duration
  // (25% -> 75% of the final size). GCV alone is nearly flat in lambda on
  // these curves and can smear a short adoption burst, biasing the maximum
  // slope; a bandwidth of at most an eighth of the rise keeps the peak.
  const double final_size = curve.final_size();
  int t25 = 0, t75 = static_cast<int>(curve.counts.size()) - 1;
  for (std::size_t i = 0; i < curve.counts.size(); ++i)
    if (curve.counts[i] >= 0.25 * final_size) {
      t25 = static_cast<int>(i);
      break;
    }
  for (std::size_t i = 0; i < curve.counts.size(); ++i)
    if (curve.counts[i] >= 0.75 * final_size) {
      t75 = static_cast<int>(i);
      break;
    }
  const double rise = std::max(8.0, static_cast<double>(t75 - t25));
  const double lambda_max = std::pow(rise / 8.0, 4.0);
  return SmoothingSpline::fit_gcv(x, curve.counts, lambda_max);
}

namespace {

double golden_max(const std::function<double(double)>& f, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 60 && (b - a) > 1e-8; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc > fd ? c : d;
}

}  // namespace

SlopePoint max_slope(const SmoothingSpline& fit) {
  const std::vector<double>& knots = fit.knots();
  auto clamped = [&](double t) { return std::max(0.0, fit.derivative(t)); };

  std::size_t best = 0;
  double best_slope = clamped(knots[0]);
  for (std::size_t i = 1; i < knots.size(); ++i) {
    const double s = clamped(knots[i]);
    if (s > best_slope) {
      best_slope = s;
      best = i;
    }
  }
  SlopePoint sp;
  sp.growth = best_slope;
  sp.t_m = knots[best];
  if (best_slope <= 0.0) return sp;  // flat curve: first grid point wins

  const double lo = knots[best > 0 ? best - 1 : 0];
  const double hi = knots[std::min(best + 1, knots.size() - 1)];
  const double refined = golden_max(clamped, lo, hi);
  if (clamped(refined) > sp.growth) {
    sp.growth = clamped(refined);
    sp.t_m = refined;
  }
  return sp;
}

namespace {

CriticalPoints critical_points_impl(const std::function<double(double)>& fit_at,
                                    const CumulativeCurve& curve, const SlopePoint& slope,
                                    double delta) {
  CriticalPoints cp;
  const double F = curve.final_size();
  const int T = static_cast<int>(curve.counts.size());

  cp.t0 = 0;
  for (int t = 0; t < T; ++t) {
    if (curve.counts[static_cast<std::size_t>(t)] > 0.0) {
      cp.t0 = t;
      break;
    }
  }
  cp.t_e = T - 1;
  for (int t = 0; t < T; ++t) {
    if (curve.counts[static_cast<std::size_t>(t)] >= 0.99 * F) {
      cp.t_e = t;
      break;
    }
  }

  const double anchor = fit_at(slope.t_m);
  const int start = std::max(cp.t0, static_cast<int>(std::ceil(slope.t_m)));
  cp.t_star = cp.t_e;
  for (int t = start; t <= cp.t_e; ++t) {
    const double tangent = anchor + slope.growth * (static_cast<double>(t) - slope.t_m);
    if (tangent - fit_at(static_cast<double>(t)) > delta * F) {
      cp.t_star = t;
      break;
    }
  }
  cp.t_star = std::clamp(cp.t_star, cp.t0, cp.t_e);
  return cp;
}

}  // namespace

CriticalPoints critical_points(const SmoothingSpline& fit, const CumulativeCurve& curve,
                               const SlopePoint& slope, double delta) {
  return critical_points_impl([&](double t) { return fit.value(t); }, curve, slope, delta);
}

CurveSummary summarize(const HashtagEpisode& episode, const std::vector<VibrancyFrame>& frames) {
  if (frames.empty()) throw DataError("summarize: empty frame series");
  const CumulativeCurve curve = make_curve(frames, episode.tracking_minutes);

  CurveSummary s;
  s.episode_id = episode.episode_id;
  s.tag = episode.tag;
  s.final_size = curve.final_size();

  SlopePoint slope;
  std::function<double(double)> fit_at;
  std::optional<SmoothingSpline> spline;
  if (curve.support_minutes >= 4) {
    spline = fit_spline(curve);
    slope = max_slope(*spline);
    fit_at = [&sp = *spline](double t) { return sp.value(t); };
  } else {
    // Secant fallback: max consecutive-minute difference over the raw curve.
    s.spline_used = false;
    double prev = 0.0;
    for (std::size_t t = 0; t < curve.counts.size(); ++t) {
      const double diff = curve.counts[t] - prev;
      if (diff > slope.growth) {
        slope.growth = diff;
        slope.t_m = static_cast<double>(t);
      }
      prev = curve.counts[t];
    }
    fit_at = [&curve](double t) {
      const auto i = static_cast<std::size_t>(
          std::clamp(t, 0.0, static_cast<double>(curve.counts.size() - 1)));
      return curve.counts[i];
    };
  }

  const CriticalPoints cp = critical_points_impl(fit_at, curve, slope, 0.01);
  s.growth = slope.growth;
  s.t_m = slope.t_m;
  s.fit_at_tm = fit_at(slope.t_m);
  s.t0 = cp.t0;
  s.t_star = cp.t_star;
  s.t_e = cp.t_e;
  s.t_star_d005 = critical_points_impl(fit_at, curve, slope, 0.005).t_star;
  s.t_star_d020 = critical_points_impl(fit_at, curve, slope, 0.02).t_star;
  return s;
}

}  // namespace taglife
