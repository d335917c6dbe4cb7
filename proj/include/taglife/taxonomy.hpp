#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace taglife {

struct FeatureVector {
  std::string tag;
  double growth = 0.0;       // tpm
  double persistence = 0.0;  // minutes
  double final_size = 0.0;   // tweets
};

enum class TagClass { Winner, AlsoRan };

inline const char* to_string(TagClass c) {
  return c == TagClass::Winner ? "winner" : "also_ran";
}

struct ClusterModel {
  std::array<std::array<double, 3>, 2> centroids{};  // standardized space
  std::array<double, 3> mean{};
  std::array<double, 3> stddev{};
  std::vector<int> assignment;  // cluster index per input point
  double wcss = 0.0;
  bool degenerate = false;  // all points identical
};

struct ClassAssignment {
  std::string tag;
  TagClass cls = TagClass::AlsoRan;
  std::array<double, 2> centroid_distance{};  // standardized space
};

/// k-means (k = 2) on z-score standardized features; k-means++ seeding,
/// 50 restarts, lowest within-cluster sum of squares wins (ties by
/// restart index). Deterministic given the seed.
ClusterModel cluster(const std::vector<FeatureVector>& features, std::uint64_t seed);

/// Winner = cluster with the larger mean raw final_size (ties by larger
/// mean growth).
std::vector<ClassAssignment> label_classes(const ClusterModel& model,
                                           const std::vector<FeatureVector>& features);

}  // namespace taglife
