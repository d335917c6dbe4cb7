#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taglife/spline.hpp"
#include "taglife/vibrancy.hpp"

namespace taglife {

/// Cumulative tweet totals on the minute grid 0..T-1 of an episode's
/// tracking window.
struct CumulativeCurve {
  std::vector<double> counts;  // counts[t] = total tweets through minute t
  int support_minutes = 0;     // minutes with at least one new tweet

  double final_size() const { return counts.empty() ? 0.0 : counts.back(); }
};

struct SlopePoint {
  double growth = 0.0;  // tweets per minute, clamped at 0
  double t_m = 0.0;     // location of the largest slope
};

struct CurveSummary {
  std::string episode_id;
  std::string tag;
  double final_size = 0.0;
  double growth = 0.0;  // tpm
  int t0 = 0;
  int t_star = 0;
  int t_e = 0;
  double t_m = 0.0;
  double fit_at_tm = 0.0;       // tangent anchor value
  bool spline_used = true;      // false when the secant fallback fired
  int t_star_d005 = 0;          // turning point at delta = 0.005
  int t_star_d020 = 0;          // turning point at delta = 0.02

  int persistence() const { return t_e - t0; }
};

CumulativeCurve make_curve(const std::vector<VibrancyFrame>& frames, int tracking_minutes);

/// Cubic smoothing spline with GCV-selected lambda. Throws DataError when
/// fewer than 4 minutes carry data (callers fall back to secant slopes).
SmoothingSpline fit_spline(const CumulativeCurve& curve);

/// Largest clamped first derivative: grid argmax over integer minutes,
/// golden-section refinement inside the winning knot interval.
SlopePoint max_slope(const SmoothingSpline& fit);

struct CriticalPoints {
  int t0 = 0;
  int t_star = 0;
  int t_e = 0;
};

/// t0 = first minute with a tweet; t_e = first minute reaching 99% of
/// final size; t_star = smallest minute >= t_m where the max-slope
/// tangent exceeds the fit by delta * final_size, clamped to [t0, t_e].
CriticalPoints critical_points(const SmoothingSpline& fit, const CumulativeCurve& curve,
                               const SlopePoint& slope, double delta = 0.01);

CurveSummary summarize(const HashtagEpisode& episode, const std::vector<VibrancyFrame>& frames);

}  // namespace taglife
