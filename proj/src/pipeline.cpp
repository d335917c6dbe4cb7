#include "taglife/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "taglife/errors.hpp"
#include "taglife/text.hpp"
#include "taglife/trajectory.hpp"
#include "taglife/vibrancy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace taglife {

void PipelineConfig::validate() const {
  if (!stages.any()) throw UsageError("pipeline config: no stage enabled");
  if (stages.features && !stages.detect)
    throw UsageError("pipeline config: 'features' requires 'detect'");
  if (stages.curves && !stages.features)
    throw UsageError("pipeline config: 'curves' requires 'features'");
  if (stages.classify && !stages.curves)
    throw UsageError("pipeline config: 'classify' requires 'curves'");
  if (stages.fit_growth && !stages.classify)
    throw UsageError("pipeline config: 'fit-growth' requires 'classify'");
  if (stages.fit_survival && !stages.classify)
    throw UsageError("pipeline config: 'fit-survival' requires 'classify'");
  if (out_dir.empty()) throw UsageError("pipeline config: output directory required");
  if (top_n < 1) throw UsageError("pipeline config: top_n must be positive");
  episode.validate();
}

PipelineConfig load_config(const std::string& path, std::string* raw_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string raw = buf.str();
  if (raw_out) *raw_out = raw;

  json j;
  try {
    j = json::parse(raw);
  } catch (const json::parse_error& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }

  PipelineConfig cfg;
  try {
    cfg.input_path = j.value("input", "");
    const std::string format = j.value("format", "jsonl");
    if (format == "jsonl")
      cfg.format = StreamFormat::Jsonl;
    else if (format == "csv")
      cfg.format = StreamFormat::Csv;
    else
      throw UsageError("config: unknown format '" + format + "'");

    if (j.contains("episode")) {
      const json& e = j["episode"];
      cfg.episode.episode_id = e.value("episode_id", "episode");
      if (e.contains("event_start")) {
        if (e["event_start"].is_string())
          cfg.episode.event_start = parse_timestamp(e["event_start"].get<std::string>(), 0);
        else
          cfg.episode.event_start = e["event_start"].get<std::int64_t>();
      }
      cfg.episode.peak_duration_min = e.value("peak_duration_min", 120);
      cfg.episode.lookback_hours = e.value("lookback_hours", 96);
      cfg.episode.tracking_hours = e.value("tracking_hours", 77);
      cfg.episode.min_users = e.value("min_users", 100);
      if (e.contains("keywords"))
        cfg.episode.keywords = e["keywords"].get<std::vector<std::string>>();
    }
    if (j.contains("stages")) {
      const json& s = j["stages"];
      cfg.stages.detect = s.value("detect", true);
      cfg.stages.features = s.value("features", true);
      cfg.stages.curves = s.value("curves", true);
      cfg.stages.classify = s.value("classify", true);
      cfg.stages.fit_growth = s.value("fit_growth", true);
      cfg.stages.fit_survival = s.value("fit_survival", true);
    }
    cfg.with_env = j.value("with_env", false);
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.top_n = j.value("top_n", 5);
    cfg.out_dir = j.value("out", "");
  } catch (const json::exception& e) {
    throw UsageError("config '" + path + "': " + e.what());
  }
  return cfg;
}

std::string content_hash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path.string() + "'");
  out << content;
}

std::string detected_csv(const std::vector<DetectedTag>& detected) {
  std::ostringstream out;
  out << "tag,users,pop,relevant\n";
  for (const DetectedTag& d : detected)
    out << join_csv({d.tag, std::to_string(d.users), d.pop ? "1" : "0", d.relevant ? "1" : "0"})
        << "\n";
  return out.str();
}

std::string features_csv(const TagSeries& ts, bool with_env) {
  std::ostringstream out;
  out << "minute,y,rt,rp,src_alpha,follow_alpha";
  if (with_env) out << ",rt_env,rp_env,src_env_alpha";
  out << "\n";
  for (std::size_t i = 0; i < ts.frames.size(); ++i) {
    const VibrancyFrame& f = ts.frames[i];
    out << f.minute << ',' << f.y << ',' << f.rt << ',' << f.rp << ',' << f.src_alpha << ','
        << fmt_double(f.follow_alpha, 4);
    if (with_env) {
      const EnvFrame& e = ts.env[i];
      out << ',' << e.rt_env << ',' << e.rp_env << ',' << e.src_env_alpha;
    }
    out << "\n";
  }
  return out.str();
}

std::string summaries_csv(const std::map<std::string, TagSeries>& series) {
  std::ostringstream out;
  out << "tag,final_size,growth,t0,t_star,t_e,t_m,persistence,spline_used\n";
  for (const auto& [tag, ts] : series) {
    const CurveSummary& s = ts.summary;
    out << join_csv({tag, fmt_compact(s.final_size), fmt_compact(s.growth),
                     std::to_string(s.t0), std::to_string(s.t_star), std::to_string(s.t_e),
                     fmt_compact(s.t_m), std::to_string(s.persistence()),
                     s.spline_used ? "1" : "0"})
        << "\n";
  }
  return out.str();
}

std::string classes_csv(const std::vector<ClassAssignment>& assignments) {
  std::ostringstream out;
  out << "tag,class,dist_cluster0,dist_cluster1\n";
  for (const ClassAssignment& a : assignments)
    out << join_csv({a.tag, to_string(a.cls), fmt_compact(a.centroid_distance[0]),
                     fmt_compact(a.centroid_distance[1])})
        << "\n";
  return out.str();
}

std::string km_csv(const KMCurve& curve) {
  std::ostringstream out;
  out << "time,survival,lower,upper,at_risk,events\n";
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    out << join_csv({fmt_compact(curve.times[i]), fmt_compact(curve.survival[i]),
                     fmt_compact(curve.lower[i]), fmt_compact(curve.upper[i]),
                     std::to_string(curve.at_risk[i]), std::to_string(curve.events[i])})
        << "\n";
  return out.str();
}

const std::vector<std::string> kCountingCovariateNames = {
    "rt_alpha", "rp_alpha", "src_alpha", "follow_alpha", "rtEnv", "rpEnv", "srcEnv_alpha"};

const char* error_kind(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return "usage";
  if (dynamic_cast<const DataError*>(&e)) return "data";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  return "internal";
}

}  // namespace

void emit_tables(const ReportBundle& bundle, const std::string& directory) {
  const ModelTable growth = growth_table("Growth models", bundle.growth_fits);
  const ModelTable persistence = survival_table("Persistence models", bundle.survival_fits);
  write_file(fs::path(directory) / "growth.txt", render_text(growth));
  write_file(fs::path(directory) / "growth.csv", render_csv(growth));
  write_file(fs::path(directory) / "persistence.txt", render_text(persistence));
  write_file(fs::path(directory) / "persistence.csv", render_csv(persistence));
}

void emit_plotdata(const ReportBundle& bundle, const PipelineConfig& config,
                   const std::string& directory) {
  const fs::path dir(directory);
  const int total = config.episode.tracking_minutes();

  std::vector<std::pair<std::string, const CumulativeCurve*>> overlay_pool;
  std::map<std::string, CumulativeCurve> curves;
  for (const auto& [tag, ts] : bundle.series)
    curves[tag] = make_curve(ts.frames, total);

  for (const auto& [tag, ts] : bundle.series) {
    const CumulativeCurve& curve = curves[tag];
    const CurveSummary& s = ts.summary;
    std::vector<double> fitted(curve.counts.size());
    bool have_spline = false;
    SmoothingSpline spline;
    if (s.spline_used) {
      try {
        spline = fit_spline(curve);
        have_spline = true;
      } catch (const DataError&) {
        have_spline = false;
      }
    }
    std::ostringstream out;
    out << "minute,cumulative,fitted,tangent\n";
    for (std::size_t t = 0; t < curve.counts.size(); ++t) {
      const double td = static_cast<double>(t);
      const double fit_v = have_spline ? spline.value(td) : curve.counts[t];
      const double tangent = s.fit_at_tm + s.growth * (td - s.t_m);
      out << t << ',' << fmt_compact(curve.counts[t]) << ',' << fmt_compact(fit_v) << ','
          << fmt_compact(tangent) << "\n";
      fitted[t] = fit_v;
    }
    write_file(dir / ("curve_" + tag + ".csv"), out.str());
    overlay_pool.emplace_back(tag, &curves[tag]);
  }

  // Top-N overlay by final size (ties broken by tag name).
  std::sort(overlay_pool.begin(), overlay_pool.end(), [](const auto& a, const auto& b) {
    if (a.second->final_size() != b.second->final_size())
      return a.second->final_size() > b.second->final_size();
    return a.first < b.first;
  });
  if (overlay_pool.size() > static_cast<std::size_t>(config.top_n))
    overlay_pool.resize(static_cast<std::size_t>(config.top_n));
  std::ostringstream overlay;
  overlay << "tag,minute,cumulative\n";
  for (const auto& [tag, curve] : overlay_pool)
    for (std::size_t t = 0; t < curve->counts.size(); ++t)
      overlay << join_csv({tag, std::to_string(t), fmt_compact(curve->counts[t])}) << "\n";
  write_file(dir / "overlay.csv", overlay.str());

  for (const auto& [cls, curve] : bundle.km_curves)
    write_file(dir / (std::string("km_") + to_string(cls) + ".csv"), km_csv(curve));
}

ReportBundle run_pipeline(const PipelineConfig& config, const std::string& config_raw) {
  config.validate();
  const fs::path out(config.out_dir);
  fs::create_directories(out);

  ReportBundle bundle;
  std::string stage = "load";
  try {
    const EventStream stream = load_events(config.input_path, config.format);
    validate_stream(stream);
    std::map<std::string, HashtagEpisode> episodes;

    if (config.stages.detect) {
      stage = "detect";
      const std::vector<std::string> novel = find_novel(stream, config.episode);
      const std::vector<std::string> pop = filter_pop(stream, config.episode, novel);
      bundle.relevant_tags =
          filter_relevant(stream, config.episode, pop, config.episode.keywords);
      for (const std::string& tag : novel) {
        DetectedTag d;
        d.tag = tag;
        d.pop = std::binary_search(pop.begin(), pop.end(), tag);
        d.relevant =
            std::binary_search(bundle.relevant_tags.begin(), bundle.relevant_tags.end(), tag);
        d.users = tracked_user_count(stream, config.episode, tag);
        bundle.detected.push_back(std::move(d));
      }
      write_file(out / "detected_tags.csv", detected_csv(bundle.detected));
    }

    if (config.stages.features) {
      stage = "features";
      for (const std::string& tag : bundle.relevant_tags) {
        HashtagEpisode ep = build_episode(stream, config.episode, tag);
        TagSeries ts;
        ts.frames = frame_series(ep);
        if (config.with_env) ts.env = env_series(ep, stream);
        write_file(out / "features" / (tag + ".csv"), features_csv(ts, config.with_env));
        bundle.series.emplace(tag, std::move(ts));
        episodes.emplace(tag, std::move(ep));
      }
    }

    if (config.stages.curves) {
      stage = "curves";
      for (auto& [tag, ts] : bundle.series)
        ts.summary = summarize(episodes.at(tag), ts.frames);
      write_file(out / "curve_summaries.csv", summaries_csv(bundle.series));
      emit_plotdata(bundle, config, (out / "plots").string());
    }

    if (config.stages.classify) {
      stage = "classify";
      std::vector<FeatureVector> feats;
      for (const auto& [tag, ts] : bundle.series) {
        FeatureVector f;
        f.tag = tag;
        f.growth = ts.summary.growth;
        f.persistence = static_cast<double>(ts.summary.persistence());
        f.final_size = ts.summary.final_size;
        feats.push_back(std::move(f));
      }
      if (feats.size() >= 2) {
        const ClusterModel model = cluster(feats, config.seed);
        bundle.assignments = label_classes(model, feats);
      }
      write_file(out / "classes.csv", classes_csv(bundle.assignments));
    }

    if (config.stages.fit_growth) {
      stage = "fit-growth";
      for (TagClass cls : {TagClass::Winner, TagClass::AlsoRan}) {
        const bool present = std::any_of(bundle.assignments.begin(), bundle.assignments.end(),
                                         [&](const ClassAssignment& a) { return a.cls == cls; });
        if (!present) continue;
        const RegressionDesign design =
            build_design(bundle.series, bundle.assignments, cls, config.with_env);
        if (design.segments.empty()) continue;
        bundle.growth_fits.emplace(cls, fit_armax(design));
      }
      const ModelTable table = growth_table("Growth models", bundle.growth_fits);
      write_file(out / "tables" / "growth.txt", render_text(table));
      write_file(out / "tables" / "growth.csv", render_csv(table));
    }

    if (config.stages.fit_survival) {
      stage = "fit-survival";
      for (TagClass cls : {TagClass::Winner, TagClass::AlsoRan}) {
        const std::vector<SurvivalRecord> records =
            build_records(bundle.series, bundle.assignments, cls);
        if (records.size() < 2) continue;
        // Too few subjects to support the four-covariate hazard model;
        // still emit the KM curve for the class.
        const bool fit_model = records.size() >= kSurvivalCovariateNames.size() + 2;
        if (!fit_model) {
          bundle.km_curves.emplace(cls, km(records));
          continue;
        }
        if (config.with_env) {
          const std::vector<CountingProcessRow> rows =
              build_counting_rows(bundle.series, bundle.assignments, cls);
          if (!rows.empty())
            bundle.survival_fits.emplace(cls, fit_cox(rows, kCountingCovariateNames));
        } else {
          bundle.survival_fits.emplace(cls, fit_cox(records));
        }
        bundle.km_curves.emplace(cls, km(records));
      }
      const ModelTable table = survival_table("Persistence models", bundle.survival_fits);
      write_file(out / "tables" / "persistence.txt", render_text(table));
      write_file(out / "tables" / "persistence.csv", render_csv(table));
      for (const auto& [cls, curve] : bundle.km_curves)
        write_file(out / "plots" / (std::string("km_") + to_string(cls) + ".csv"),
                   km_csv(curve));
    }

    stage = "manifest";
    json manifest;
    manifest["config_hash"] = content_hash(config_raw);
    manifest["seed"] = config.seed;
    manifest["with_env"] = config.with_env;
    manifest["top_n"] = config.top_n;
    manifest["n_events"] = stream.size();
    manifest["input"] = config.input_path;
    manifest["stages"] = {{"detect", config.stages.detect},
                          {"features", config.stages.features},
                          {"curves", config.stages.curves},
                          {"classify", config.stages.classify},
                          {"fit_growth", config.stages.fit_growth},
                          {"fit_survival", config.stages.fit_survival}};
    manifest["versions"] = {{"taglife", "1.0.0"}};
    bundle.manifest_json = manifest.dump(2) + "\n";
    write_file(out / "manifest.json", bundle.manifest_json);
  } catch (const std::exception& e) {
    json err;
    err["stage"] = stage;
    err["type"] = error_kind(e);
    err["message"] = e.what();
    write_file(out / "errors.json", err.dump(2) + "\n");
    throw;
  }
  return bundle;
}

}  // namespace taglife
