#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taglife/armax.hpp"
#include "taglife/episodes.hpp"
#include "taglife/events.hpp"
#include "taglife/report.hpp"
#include "taglife/survival.hpp"

namespace taglife {

struct StageToggles {
  bool detect = true;
  bool features = true;
  bool curves = true;
  bool classify = true;
  bool fit_growth = true;
  bool fit_survival = true;

  bool any() const {
    return detect || features || curves || classify || fit_growth || fit_survival;
  }
};

struct PipelineConfig {
  std::string input_path;
  StreamFormat format = StreamFormat::Jsonl;
  EpisodeConfig episode;
  std::string out_dir;
  StageToggles stages;
  bool with_env = false;
  std::uint64_t seed = 1;
  int top_n = 5;  // cumulative overlay size

  /// Throws UsageError on inconsistent toggles (a stage enabled while a
  /// stage it depends on is disabled) or when no stage is enabled.
  void validate() const;
};

/// Parses the structured JSON config; `raw_out`, when given, receives the
/// exact file bytes for manifest hashing.
PipelineConfig load_config(const std::string& path, std::string* raw_out = nullptr);

struct DetectedTag {
  std::string tag;
  bool pop = false;
  bool relevant = false;
  std::size_t users = 0;
};

struct ReportBundle {
  std::vector<DetectedTag> detected;
  std::vector<std::string> relevant_tags;  // survivors of all three filters
  std::map<std::string, TagSeries> series;
  std::vector<ClassAssignment> assignments;
  std::map<TagClass, ArmaxFit> growth_fits;
  std::map<TagClass, CoxFit> survival_fits;
  std::map<TagClass, KMCurve> km_curves;
  std::string manifest_json;
};

/// Runs the enabled stages in dependency order, persisting each stage's
/// outputs under config.out_dir before starting the next. On a stage
/// failure the partial outputs stay on disk, errors.json records the
/// failure, and the exception propagates.
ReportBundle run_pipeline(const PipelineConfig& config, const std::string& config_raw = "");

/// Writes model tables (text + CSV) for whichever fits the bundle holds.
void emit_tables(const ReportBundle& bundle, const std::string& directory);

/// Writes per-tag curve CSVs (cumulative/fitted/tangent), the top-N
/// cumulative overlay, and KM curve CSVs.
void emit_plotdata(const ReportBundle& bundle, const PipelineConfig& config,
                   const std::string& directory);

/// FNV-1a 64-bit content hash, hex-encoded; used for manifest provenance.
std::string content_hash(const std::string& bytes);

}  // namespace taglife
