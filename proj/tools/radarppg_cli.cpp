// SPDX-License-Identifier: Apache-2.0
// Command-line front end: simulate, process, train, eval, score, run, import.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "radarppg/errors.hpp"
#include "radarppg/harness/config.hpp"
#include "radarppg/harness/experiment.hpp"
#include "radarppg/harness/importer.hpp"
#include "radarppg/metrics/metrics.hpp"
#include "radarppg/metrics/report.hpp"
#include "radarppg/pipeline/feature_io.hpp"
#include "radarppg/sim/recording_io.hpp"
#include "radarppg/sim/scenario.hpp"
#include "radarppg/version.hpp"

namespace fs = std::filesystem;
using namespace radarppg;

namespace {

enum ExitCode : int { kOk = 0, kOther = 1, kConfig = 2, kFormat = 3, kPipeline = 4 };

void log_line(const std::string& s) { std::cerr << s << '\n'; }

std::vector<double> read_samples(const std::string& path) {
  if (path.ends_with(".rvf")) return pipeline::read_features(path).ppg;
  std::ifstream f(path);
  if (!f) throw FormatError("cannot open " + path, 0);
  std::vector<double> x;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    try {
      x.push_back(std::stod(line));
    } catch (const std::exception&) {
      throw FormatError("bad sample '" + line + "' in " + path, static_cast<std::uint64_t>(f.tellg()));
    }
  }
  return x;
}

std::string csv_path_for(const std::string& json_path) {
  fs::path p(json_path);
  return p.replace_extension(".csv").string();
}

int cmd_simulate(const std::string& scenario, const std::string& out_dir, std::uint64_t seed, double duration,
                 std::optional<double> snr) {
  auto p = sim::scenario_preset(scenario);
  p.duration_s = duration;
  p.seed = seed;
  sim::RadarConfig radar;
  p.fs = radar.prf;
  sim::SynthesisOptions o;
  o.seed = seed ^ 0x9e3779b97f4a7c15ULL;
  o.scenario_label = scenario;
  if (snr) o.snr_db = *snr;
  const auto cube = sim::synthesize_cube(radar, sim::generate_physio(p), o);
  fs::create_directories(out_dir);
  const auto path = (fs::path(out_dir) / (scenario + "-" + std::to_string(seed) + ".rvr")).string();
  sim::write_recording(cube, path);
  std::cout << path << '\n';
  return kOk;
}

int cmd_process(const std::string& in, const std::string& out) {
  const auto cube = sim::read_recording(in);
  auto pr = pipeline::process_recording(cube, pipeline::default_feature_filters(cube.config.prf));
  pipeline::write_features({pr.features, pr.ppg, pr.scenario_label, fs::path(in).stem().string()}, out);
  std::cout << out << '\n';
  return kOk;
}

int cmd_train(const std::string& config, const std::string& out, const std::string& history) {
  const auto cfg = harness::load_experiment_config(config);
  auto data = harness::prepare_data(cfg, false, log_line);
  auto tm = harness::fit_model(cfg, data, log_line);
  const auto hash = harness::config_hash(harness::to_json(cfg));
  model::save_model(out, tm.model, tm.stats,
                    {{"config_hash", hash},
                     {"seeds", {{"sim", cfg.sim_seed}, {"train", cfg.model.seed}}},
                     {"best_epoch", tm.result.best_epoch},
                     {"split", cfg.split},
                     {"window_s", cfg.window_s},
                     {"stride_s", cfg.stride_s}});
  if (!history.empty()) {
    std::ofstream f(history);
    f << model::history_to_json(tm.result.history).dump(2) << '\n';
  }
  std::cout << out << '\n';
  return kOk;
}

int cmd_eval(const std::string& ckpt, const std::string& features_dir, const std::string& report_path) {
  auto loaded = model::load_model(ckpt);
  const auto& m = loaded.manifest;
  const auto split = m.value("split", std::array<double, 3>{0.70, 0.15, 0.15});
  const double window_s = m.value("window_s", 10.0), stride_s = m.value("stride_s", 1.0);

  std::vector<fs::path> files;
  if (fs::is_directory(features_dir)) {
    for (const auto& e : fs::directory_iterator(features_dir))
      if (e.path().extension() == ".rvf") files.push_back(e.path());
  } else {
    files.push_back(features_dir);
  }
  if (files.empty()) throw ConfigError("no .rvf feature files under " + features_dir);
  std::sort(files.begin(), files.end());

  std::vector<harness::PreparedRecording> recs;
  for (const auto& f : files) {
    auto ff = pipeline::read_features(f.string());
    harness::PreparedRecording r;
    r.id = ff.recording_id.empty() ? f.stem().string() : ff.recording_id;
    r.scenario = ff.scenario_label.empty() ? "unlabelled" : ff.scenario_label;
    r.split = harness::split_recording(ff.features.frames, split,
                                       static_cast<std::size_t>(std::llround(window_s * ff.features.fs)));
    r.features = std::move(ff.features);
    r.ppg = std::move(ff.ppg);
    recs.push_back(std::move(r));
  }
  auto report = harness::evaluate(loaded.model, loaded.stats, recs, window_s, stride_s);
  report.metadata = {{"checkpoint", ckpt}, {"config_hash", m.value("config_hash", "")}};
  metrics::write_report(report, report_path, csv_path_for(report_path));
  std::cout << metrics::to_csv(report);
  return kOk;
}

int cmd_score(const std::string& est_path, const std::string& ref_path, const std::string& report_path, double fs) {
  const auto est = read_samples(est_path);
  const auto ref = read_samples(ref_path);
  if (est.size() != ref.size())
    throw EvaluationError("estimate has " + std::to_string(est.size()) + " samples, reference " +
                          std::to_string(ref.size()));
  const auto ahr = metrics::ahr_error(est, ref, fs);
  const auto hrv = metrics::hrv_error(est, ref, fs);
  const auto s = metrics::fom_and_score(ahr.rmse_bpm, hrv.pearson, hrv.rmse_bpm);
  metrics::ScoreRow row{"custom", "estimate", ahr.rmse_bpm, hrv.rmse_bpm, hrv.pearson, s.fom_ahr_weighted,
                        s.fom_hrv_weighted, s.score, ahr.frames_excluded, {}};
  if (s.ahr_saturated) row.flags.push_back("ahr_saturated");
  if (s.hrv_saturated) row.flags.push_back("hrv_saturated");
  metrics::ScoreReport report;
  report.rows.push_back(row);
  report.metadata = {{"est", est_path}, {"ref", ref_path}, {"fs", fs}};
  metrics::write_report(report, report_path, csv_path_for(report_path));
  std::cout << metrics::to_csv(report);
  return kOk;
}

int cmd_run(const std::string& config, const std::string& out_override) {
  auto j = nlohmann::json::object();
  {
    std::ifstream f(config);
    if (!f) throw ConfigError("cannot open config " + config);
    try {
      f >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("config " + config + " is not valid JSON: " + e.what());
    }
  }
  if (!out_override.empty()) j["output_dir"] = out_override;
  const auto cfg = harness::experiment_config_from_json(j);
  const auto res = harness::run_experiment(cfg, log_line);
  std::cout << metrics::to_csv(res.report);
  for (const auto& [method, total] : res.report.total_scores()) std::cout << "total " << method << ' ' << total << '\n';
  return kOk;
}

int cmd_import(const std::string& raw, const std::string& sidecar, const std::string& out) {
  const auto cube = harness::import_challenge_cube(raw, sidecar);
  sim::write_recording(cube, out);
  std::cout << out << '\n';
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FMCW radar to PPG toolkit"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  std::string scenario = "stationary", out, in, config, ckpt, features, report, est, ref, raw, sidecar, history;
  std::uint64_t seed = 1;
  double duration = 70.0, fs = 200.0;
  std::optional<double> snr;

  auto* simulate = app.add_subcommand("simulate", "Synthesize one recording (.rvr)");
  simulate->add_option("--scenario", scenario)->check(CLI::IsMember(sim::scenario_names()));
  simulate->add_option("--out", out, "Output directory")->required();
  simulate->add_option("--seed", seed);
  simulate->add_option("--duration", duration, "Seconds");
  simulate->add_option("--snr", snr, "Chest-echo SNR in dB (default 20)");

  auto* process = app.add_subcommand("process", "Recording (.rvr) to features (.rvf)");
  process->add_option("--in", in)->required();
  process->add_option("--out", out)->required();

  auto* train = app.add_subcommand("train", "Simulate, process and train from a JSON config");
  train->add_option("--config", config)->required();
  train->add_option("--out", out, "Checkpoint path")->required();
  train->add_option("--history", history, "Optional JSON training history");

  auto* eval = app.add_subcommand("eval", "Score a checkpoint on the test partitions of feature files");
  eval->add_option("--ckpt", ckpt)->required();
  eval->add_option("--features", features, "Directory of .rvf files or a single file")->required();
  eval->add_option("--report", report, "JSON report; a CSV is written next to it")->required();

  auto* score = app.add_subcommand("score", "Score an estimated PPG against a reference");
  score->add_option("--est", est, "Text file (one sample per line) or .rvf")->required();
  score->add_option("--ref", ref)->required();
  score->add_option("--report", report)->required();
  score->add_option("--fs", fs, "Sample rate in Hz");

  auto* run = app.add_subcommand("run", "Full experiment from a JSON config");
  run->add_option("--config", config)->required();
  run->add_option("--out", out, "Overrides output_dir");

  auto* import = app.add_subcommand("import", "Raw cube plus JSON sidecar to .rvr");
  import->add_option("--raw", raw)->required();
  import->add_option("--sidecar", sidecar)->required();
  import->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*simulate) return cmd_simulate(scenario, out, seed, duration, snr);
    if (*process) return cmd_process(in, out);
    if (*train) return cmd_train(config, out, history);
    if (*eval) return cmd_eval(ckpt, features, report);
    if (*score) return cmd_score(est, ref, report, fs);
    if (*run) return cmd_run(config, out);
    if (*import) return cmd_import(raw, sidecar, out);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kFormat;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline error: " << e.what() << '\n';
    return kPipeline;
  } catch (const EvaluationError& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kPipeline;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
