#include "taglife/taxonomy.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "taglife/errors.hpp"

namespace taglife {

namespace {

constexpr int kRestarts = 50;
constexpr int kMaxIters = 100;

using Point = std::array<double, 3>;

double sq_dist(const Point& a, const Point& b) {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return s;
}

struct Run {
  std::array<Point, 2> centroids{};
  std::vector<int> assignment;
  double wcss = 0.0;
};

Run lloyd(const std::vector<Point>& pts, std::mt19937_64& rng) {
  const std::size_t n = pts.size();
  Run run;
  run.assignment.assign(n, 0);

  // k-means++ seeding
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  run.centroids[0] = pts[pick(rng)];
  std::vector<double> d2(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = sq_dist(pts[i], run.centroids[0]);
    total += d2[i];
  }
  if (total <= 0.0) {
    run.centroids[1] = run.centroids[0];
  } else {
    std::uniform_real_distribution<double> u(0.0, total);
    double target = u(rng), acc = 0.0;
    std::size_t chosen = n - 1;
    for (std::size_t i = 0; i < n; ++i) {
      acc += d2[i];
      if (acc >= target) {
        chosen = i;
        break;
      }
    }
    run.centroids[1] = pts[chosen];
  }

  for (int iter = 0; iter < kMaxIters; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int best = sq_dist(pts[i], run.centroids[0]) <= sq_dist(pts[i], run.centroids[1]) ? 0 : 1;
      if (best != run.assignment[i]) {
        run.assignment[i] = best;
        changed = true;
      }
    }
    std::array<Point, 2> sums{};
    std::array<std::size_t, 2> counts{};
    for (std::size_t i = 0; i < n; ++i) {
      const int c = run.assignment[i];
      ++counts[static_cast<std::size_t>(c)];
      for (int d = 0; d < 3; ++d) sums[static_cast<std::size_t>(c)][d] += pts[i][d];
    }
    for (int c = 0; c < 2; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;  // keep previous centroid
      for (int d = 0; d < 3; ++d)
        run.centroids[static_cast<std::size_t>(c)][d] =
            sums[static_cast<std::size_t>(c)][d] / static_cast<double>(counts[static_cast<std::size_t>(c)]);
    }
    if (!changed && iter > 0) break;
  }

  run.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    run.wcss += sq_dist(pts[i], run.centroids[static_cast<std::size_t>(run.assignment[i])]);
  return run;
}

}  // namespace

ClusterModel cluster(const std::vector<FeatureVector>& features, std::uint64_t seed) {
  const std::size_t n = features.size();
  if (n < 2) throw DataError("cluster: need at least 2 feature vectors");

  ClusterModel model;
  std::vector<Point> raw(n);
  for (std::size_t i = 0; i < n; ++i)
    raw[i] = {features[i].growth, features[i].persistence, features[i].final_size};

  for (int d = 0; d < 3; ++d) {
    double mean = 0.0;
    for (const Point& p : raw) mean += p[d];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const Point& p : raw) var += (p[d] - mean) * (p[d] - mean);
    var /= static_cast<double>(n - 1);
    model.mean[d] = mean;
    model.stddev[d] = var > 0.0 ? std::sqrt(var) : 1.0;
  }
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i)
    for (int d = 0; d < 3; ++d) pts[i][d] = (raw[i][d] - model.mean[d]) / model.stddev[d];

  bool all_same = true;
  for (std::size_t i = 1; i < n && all_same; ++i)
    if (sq_dist(pts[i], pts[0]) > 0.0) all_same = false;
  if (all_same) {
    model.degenerate = true;
    model.centroids = {pts[0], pts[0]};
    model.assignment.assign(n, 0);
    return model;
  }

  double best_wcss = std::numeric_limits<double>::infinity();
  Run best;
  for (int r = 0; r < kRestarts; ++r) {
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(r) * 0x9e3779b97f4a7c15ULL);
    Run run = lloyd(pts, rng);
    if (run.wcss < best_wcss) {
      best_wcss = run.wcss;
      best = std::move(run);
    }
  }
  model.centroids = best.centroids;
  model.assignment = best.assignment;
  model.wcss = best.wcss;
  return model;
}

std::vector<ClassAssignment> label_classes(const ClusterModel& model,
                                           const std::vector<FeatureVector>& features) {
  const std::size_t n = features.size();
  if (model.assignment.size() != n)
    throw UsageError("label_classes: model/features size mismatch");

  std::array<double, 2> size_sum{}, growth_sum{};
  std::array<std::size_t, 2> counts{};
  for (std::size_t i = 0; i < n; ++i) {
    const auto c = static_cast<std::size_t>(model.assignment[i]);
    ++counts[c];
    size_sum[c] += features[i].final_size;
    growth_sum[c] += features[i].growth;
  }
  auto mean = [&](const std::array<double, 2>& sum, std::size_t c) {
    return counts[c] ? sum[c] / static_cast<double>(counts[c]) : -std::numeric_limits<double>::infinity();
  };
  int winner = 0;
  const double s0 = mean(size_sum, 0), s1 = mean(size_sum, 1);
  if (s1 > s0) winner = 1;
  else if (s1 == s0 && mean(growth_sum, 1) > mean(growth_sum, 0)) winner = 1;

  std::vector<ClassAssignment> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].tag = features[i].tag;
    out[i].cls = model.assignment[i] == winner ? TagClass::Winner : TagClass::AlsoRan;
    std::array<double, 3> p{};
    for (int d = 0; d < 3; ++d) {
      const double raw = d == 0   ? features[i].growth
                         : d == 1 ? features[i].persistence
                                  : features[i].final_size;
      p[d] = (raw - model.mean[d]) / model.stddev[d];
    }
    for (std::size_t c = 0; c < 2; ++c) {
      double s = 0.0;
      for (int d = 0; d < 3; ++d) {
        const double diff = p[d] - model.centroids[c][d];
        s += diff * diff;
      }
      out[i].centroid_distance[c] = std::sqrt(s);
    }
  }
  return out;
}

}  // namespace taglife
