#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "taglife/errors.hpp"
#include "taglife/pipeline.hpp"
#include "taglife/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace taglife;

namespace {

struct GlobalOpts {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool with_env = false;
};

StreamFormat parse_format(const std::string& name) {
  if (name == "jsonl") return StreamFormat::Jsonl;
  if (name == "csv") return StreamFormat::Csv;
  throw UsageError("unknown stream format '" + name + "' (expected jsonl or csv)");
}

PipelineConfig make_config(const GlobalOpts& g, std::string& raw) {
  if (g.config_path.empty()) throw UsageError("--config is required for this subcommand");
  PipelineConfig cfg = load_config(g.config_path, &raw);
  if (!g.out_dir.empty()) cfg.out_dir = g.out_dir;
  if (g.seed_set) cfg.seed = g.seed;
  if (g.with_env) cfg.with_env = true;
  return cfg;
}

void run_stages(const GlobalOpts& g, const StageToggles& stages) {
  std::string raw;
  PipelineConfig cfg = make_config(g, raw);
  cfg.stages = stages;
  run_pipeline(cfg, raw);
}

void cmd_validate(const std::string& input, const std::string& format) {
  const EventStream stream = load_events(input, parse_format(format));
  const StreamStats stats = validate_stream(stream);
  std::cout << "events: " << stats.event_count << "\n"
            << "unique_users: " << stats.unique_users << "\n"
            << "retweets: " << stats.retweet_count << "\n"
            << "replies: " << stats.reply_count << "\n"
            << "t_min: " << stats.t_min << "\n"
            << "t_max: " << stats.t_max << "\n";
}

void cmd_simulate(const GlobalOpts& g, const std::string& scenario_name) {
  if (g.out_dir.empty()) throw UsageError("simulate requires --out DIR");
  const std::uint64_t seed = g.seed_set ? g.seed : 1;
  ScenarioSpec spec;
  if (scenario_name == "detection")
    spec = detection_scenario(seed);
  else if (scenario_name == "standard")
    spec = standard_scenario(seed);
  else
    throw UsageError("unknown scenario '" + scenario_name + "' (expected detection or standard)");

  const Scenario scenario = gen_debate_scenario(spec);
  fs::create_directories(g.out_dir);
  {
    std::ofstream out(fs::path(g.out_dir) / "stream.jsonl", std::ios::binary);
    if (!out) throw UsageError("cannot write to '" + g.out_dir + "'");
    serialize_events(scenario.stream, out);
  }
  json truth;
  truth["novel"] = scenario.truth.novel;
  truth["pop"] = scenario.truth.pop;
  truth["relevant"] = scenario.truth.relevant;
  truth["analytic_growth"] = scenario.truth.analytic_growth;
  truth["analytic_te"] = scenario.truth.analytic_te;
  truth["winners"] =
      std::vector<std::string>(scenario.truth.planted_winners.begin(),
                               scenario.truth.planted_winners.end());
  truth["tracked_events"] = scenario.truth.tracked_events;
  {
    std::ofstream out(fs::path(g.out_dir) / "truth.json", std::ios::binary);
    out << truth.dump(2) << "\n";
  }
  json cfg;
  cfg["input"] = (fs::path(g.out_dir) / "stream.jsonl").string();
  cfg["format"] = "jsonl";
  cfg["episode"] = {{"episode_id", spec.episode.episode_id},
                    {"event_start", spec.episode.event_start},
                    {"peak_duration_min", spec.episode.peak_duration_min},
                    {"lookback_hours", spec.episode.lookback_hours},
                    {"tracking_hours", spec.episode.tracking_hours},
                    {"min_users", spec.episode.min_users},
                    {"keywords", spec.episode.keywords}};
  cfg["seed"] = seed;
  cfg["out"] = (fs::path(g.out_dir) / "report").string();
  {
    std::ofstream out(fs::path(g.out_dir) / "config.json", std::ios::binary);
    out << cfg.dump(2) << "\n";
  }
  std::cout << "wrote " << scenario.stream.size() << " events to " << g.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hashtag lifecycle analytics: detection, vibrancy features, trajectory "
               "characterization, growth and persistence models"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--config", g.config_path, "Pipeline config JSON path");
  app.add_option("--out", g.out_dir, "Output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", g.seed, "Random seed (overrides config)");
  app.add_flag("--with-env", g.with_env, "Include environmental covariates");

  std::string input, format = "jsonl", scenario = "detection";
  auto* validate = app.add_subcommand("validate", "Parse and integrity-check an event stream");
  validate->add_option("--input", input, "Event stream path")->required();
  validate->add_option("--format", format, "jsonl or csv");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic scenario with ground truth");
  simulate->add_option("--scenario", scenario, "detection or standard");

  auto* detect = app.add_subcommand("detect", "Detect novel/pop/relevant hashtags");
  auto* features = app.add_subcommand("features", "Emit per-minute vibrancy features");
  auto* curves = app.add_subcommand("curves", "Fit trajectory curves and summaries");
  auto* classify = app.add_subcommand("classify", "Cluster trajectories into winner/also-ran");
  auto* fit_growth = app.add_subcommand("fit-growth", "Fit the growth regression models");
  auto* fit_survival = app.add_subcommand("fit-survival", "Fit the persistence hazard models");
  auto* km_cmd = app.add_subcommand("km", "Emit Kaplan-Meier survival curves");
  auto* report = app.add_subcommand("report", "Run all stages and emit tables and plot data");
  auto* run = app.add_subcommand("run", "Run the full pipeline");

  // Let global flags appear after the subcommand name as well.
  for (CLI::App* sub : app.get_subcommands(nullptr)) sub->fallthrough();

  try {
    app.parse(argc, argv);
    g.seed_set = seed_opt->count() > 0;

    StageToggles t;
    t.detect = t.features = t.curves = t.classify = t.fit_growth = t.fit_survival = false;
    if (validate->parsed()) {
      cmd_validate(input, format);
    } else if (simulate->parsed()) {
      cmd_simulate(g, scenario);
    } else if (detect->parsed()) {
      t.detect = true;
      run_stages(g, t);
    } else if (features->parsed()) {
      t.detect = t.features = true;
      run_stages(g, t);
    } else if (curves->parsed()) {
      t.detect = t.features = t.curves = true;
      run_stages(g, t);
    } else if (classify->parsed()) {
      t.detect = t.features = t.curves = t.classify = true;
      run_stages(g, t);
    } else if (fit_growth->parsed()) {
      t.detect = t.features = t.curves = t.classify = t.fit_growth = true;
      run_stages(g, t);
    } else if (fit_survival->parsed() || km_cmd->parsed()) {
      t.detect = t.features = t.curves = t.classify = t.fit_survival = true;
      run_stages(g, t);
    } else if (report->parsed() || run->parsed()) {
      t.detect = t.features = t.curves = t.classify = t.fit_growth = t.fit_survival = true;
      run_stages(g, t);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
