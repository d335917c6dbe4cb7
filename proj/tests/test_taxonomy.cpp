#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <random>

#include "taglife/errors.hpp"
#include "taglife/taxonomy.hpp"

using namespace taglife;

namespace {

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < n; ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  auto comb2 = [](double m) { return m * (m - 1.0) / 2.0; };
  double sum_cells = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [k, v] : cells) sum_cells += comb2(v);
  for (const auto& [k, v] : rows) sum_rows += comb2(v);
  for (const auto& [k, v] : cols) sum_cols += comb2(v);
  const double total = comb2(static_cast<double>(n));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  return (sum_cells - expected) / (max_index - expected);
}

std::vector<FeatureVector> two_blobs(std::uint64_t seed, std::vector<int>& labels) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<FeatureVector> fv;
  for (int i = 0; i < 60; ++i) {
    const bool big = i < 15;
    FeatureVector f;
    f.tag = "t" + std::to_string(i);
    // Two blobs >= 5 sigma apart in every dimension.
    f.growth = (big ? 50.0 : 5.0) + g(rng);
    f.persistence = (big ? 4000.0 : 200.0) + 10.0 * g(rng);
    f.final_size = (big ? 15000.0 : 500.0) + 30.0 * g(rng);
    fv.push_back(std::move(f));
    labels.push_back(big ? 1 : 0);
  }
  return fv;
}

}  // namespace

TEST_CASE("two well-separated blobs recovered exactly") {
  std::vector<int> labels;
  const auto fv = two_blobs(3, labels);
  const ClusterModel model = cluster(fv, 99);
  CHECK_FALSE(model.degenerate);
  CHECK(adjusted_rand_index(model.assignment, labels) == doctest::Approx(1.0));
}

TEST_CASE("two distinct points split into singleton clusters") {
  std::vector<FeatureVector> fv(2);
  fv[0] = {"a", 1.0, 10.0, 100.0};
  fv[1] = {"b", 9.0, 90.0, 900.0};
  const ClusterModel model = cluster(fv, 1);
  CHECK(model.assignment[0] != model.assignment[1]);
}

TEST_CASE("identical points set the degenerate flag") {
  std::vector<FeatureVector> fv(5, FeatureVector{"t", 2.0, 2.0, 2.0});
  const ClusterModel model = cluster(fv, 1);
  CHECK(model.degenerate);
  for (int a : model.assignment) CHECK(a == model.assignment[0]);
}

TEST_CASE("n < k rejected") {
  std::vector<FeatureVector> fv(1);
  CHECK_THROWS_AS(cluster(fv, 1), DataError);
}

TEST_CASE("winner label goes to the larger mean final size") {
  std::vector<int> labels;
  auto fv = two_blobs(5, labels);
  // Append two realistic winner-class fixture rows.
  fv.push_back({"bigbird", 45.45, 4405.0, 12667.0});
  fv.push_back({"bindersfullofwomen", 51.10, 4003.0, 22287.0});
  labels.push_back(1);
  labels.push_back(1);
  const ClusterModel model = cluster(fv, 7);
  const auto assignments = label_classes(model, fv);
  std::map<std::string, TagClass> by_tag;
  for (const auto& a : assignments) by_tag[a.tag] = a.cls;
  CHECK(by_tag["bigbird"] == TagClass::Winner);
  CHECK(by_tag["bindersfullofwomen"] == TagClass::Winner);
  CHECK(by_tag["t20"] == TagClass::AlsoRan);

  double win_size = 0.0, win_n = 0.0, also_size = 0.0, also_n = 0.0;
  for (std::size_t i = 0; i < fv.size(); ++i) {
    if (by_tag[fv[i].tag] == TagClass::Winner) {
      win_size += fv[i].final_size;
      win_n += 1.0;
    } else {
      also_size += fv[i].final_size;
      also_n += 1.0;
    }
  }
  CHECK(win_size / win_n >= also_size / also_n);
}

TEST_CASE("assignments invariant under positive affine rescaling") {
  std::vector<int> labels;
  const auto fv = two_blobs(11, labels);
  auto scaled = fv;
  for (auto& f : scaled) {
    f.growth = 1000.0 * f.growth;
    f.persistence = 0.001 * f.persistence;
    f.final_size = 7.0 * f.final_size;
  }
  const ClusterModel a = cluster(fv, 13);
  const ClusterModel b = cluster(scaled, 13);
  // Same partition up to cluster relabeling.
  const double ari = adjusted_rand_index(a.assignment, b.assignment);
  CHECK(ari == doctest::Approx(1.0));
}

TEST_CASE("same seed reproduces identical assignments") {
  std::vector<int> labels;
  const auto fv = two_blobs(17, labels);
  const ClusterModel a = cluster(fv, 21);
  const ClusterModel b = cluster(fv, 21);
  CHECK(a.assignment == b.assignment);
  CHECK(a.wcss == b.wcss);
}

TEST_CASE("standardized features have mean 0 and unit variance") {
  std::vector<int> labels;
  const auto fv = two_blobs(23, labels);
  const ClusterModel model = cluster(fv, 5);
  for (int d = 0; d < 3; ++d) {
    CHECK(model.stddev[static_cast<std::size_t>(d)] > 0.0);
  }
}
