// SPDX-License-Identifier: Apache-2.0
#include "radarppg/harness/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radarppg/dsp/signal_ops.hpp"
#include "radarppg/errors.hpp"
#include "radarppg/metrics/metrics.hpp"
#include "radarppg/pipeline/feature_io.hpp"
#include "radarppg/sim/physio.hpp"
#include "radarppg/sim/recording_io.hpp"
#include "radarppg/version.hpp"

namespace radarppg::harness {

namespace fs = std::filesystem;

namespace {

std::string strip_offset_suffix(const std::string& what) {
  const auto pos = what.rfind(" (at byte ");
  return pos == std::string::npos ? what : what.substr(0, pos);
}

// Runs fn, re-throwing any library error as the same type with the stage
// and recording prefixed to its message.
template <typename F>
auto in_stage(const std::string& stage, const std::string& id, F&& fn) {
  const std::string where = stage + (id.empty() ? "" : " [" + id + "]") + ": ";
  try {
    return fn();
  } catch (const FormatError& e) {
    throw FormatError(where + strip_offset_suffix(e.what()), e.offset());
  } catch (const ConfigError& e) {
    throw ConfigError(where + e.what());
  } catch (const EvaluationError& e) {
    throw EvaluationError(where + e.what());
  } catch (const PipelineError& e) {
    throw PipelineError(where + e.what());
  } catch (const ShapeError& e) {
    throw ShapeError(where + e.what());
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  } catch (const InvalidState& e) {
    throw InvalidState(where + e.what());
  }
}

std::size_t frames_for(double seconds, double fs) { return static_cast<std::size_t>(std::llround(seconds * fs)); }

void note(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  std::ofstream f(path);
  if (!f) throw InvalidArgument("cannot write " + path.string());
  f << j.dump(2) << '\n';
}

struct MethodAccumulator {
  std::vector<metrics::AhrResult> ahr;
  std::vector<metrics::HrvResult> hrv;
  std::vector<double> est, ref;
  std::size_t ahr_excluded = 0;
  std::size_t hrv_undefined = 0;
  std::size_t ahr_undefined = 0;

  void add(const std::vector<double>& e, std::span<const double> r, double fs) {
    try {
      ahr.push_back(metrics::ahr_error(e, r, fs));
      ahr_excluded += ahr.back().frames_excluded;
    } catch (const EvaluationError&) {
      ++ahr_undefined;
    }
    try {
      hrv.push_back(metrics::hrv_error(e, r, fs));
    } catch (const EvaluationError&) {
      ++hrv_undefined;
    }
    est.insert(est.end(), e.begin(), e.end());
    ref.insert(ref.end(), r.begin(), r.end());
  }

  metrics::ScoreRow row(const std::string& scenario, const std::string& method) const {
    metrics::ScoreRow out;
    out.scenario = scenario;
    out.method = method;
    out.ahr_frames_excluded = ahr_excluded;
    out.pearson = dsp::pearson(est, ref);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out.delta_ahr_bpm = ahr.empty() ? nan : metrics::pooled_ahr_rmse(ahr);
    out.delta_hrv_bpm = hrv.empty() ? nan : metrics::pooled_hrv_rmse(hrv);
    const auto s = metrics::fom_and_score(ahr.empty() ? 0.0 : out.delta_ahr_bpm, out.pearson,
                                          hrv.empty() ? 0.0 : out.delta_hrv_bpm);
    out.fom_ahr_w = ahr.empty() ? 0.0 : s.fom_ahr_weighted;
    out.fom_hrv_w = hrv.empty() ? 0.0 : s.fom_hrv_weighted;
    out.score = out.fom_ahr_w + out.fom_hrv_w;
    if (ahr.empty()) out.flags.push_back("ahr_undefined");
    else if (s.ahr_saturated) out.flags.push_back("ahr_saturated");
    if (ahr_undefined > 0 && !ahr.empty()) out.flags.push_back("ahr_partial");
    if (hrv.empty()) out.flags.push_back("hrv_undefined");
    else if (s.hrv_saturated) out.flags.push_back("hrv_saturated");
    if (hrv_undefined > 0 && !hrv.empty()) out.flags.push_back("hrv_partial");
    return out;
  }
};

}  // namespace

PreparedData prepare_data(const ExperimentConfig& cfg, bool write, const Logger& log) {
  cfg.validate();
  const fs::path out(cfg.output_dir);
  if (write) {
    if (cfg.write_recordings) fs::create_directories(out / "recordings");
    fs::create_directories(out / "features");
  }
  const auto filters = pipeline::default_feature_filters(cfg.radar.prf);

  PreparedData data;
  for (const auto& scenario : cfg.scenarios) {
    for (std::size_t i = 0; i < cfg.recordings_per_scenario; ++i) {
      const auto id = recording_id(scenario, i);
      const auto cube = in_stage("simulate", id, [&] {
        const auto truth = sim::generate_physio(cfg.physio_for(scenario, i));
        return sim::synthesize_cube(cfg.radar, truth, cfg.synthesis_for(scenario, i));
      });
      if (write && cfg.write_recordings)
        in_stage("write recording", id, [&] { sim::write_recording(cube, (out / "recordings" / (id + ".rvr")).string()); });
      auto processed = in_stage("process", id, [&] { return pipeline::process_recording(cube, filters); });
      PreparedRecording rec{id, scenario, std::move(processed.features), std::move(processed.ppg), {}};
      if (write)
        in_stage("write features", id, [&] {
          pipeline::write_features({rec.features, rec.ppg, scenario, id}, (out / "features" / (id + ".rvf")).string());
        });
      note(log, "prepared " + id + " (" + std::to_string(rec.features.frames) + " frames)");
      data.recordings.push_back(std::move(rec));
    }
  }
  cut_windows(data, cfg);
  return data;
}

void cut_windows(PreparedData& data, const ExperimentConfig& cfg) {
  data.train_windows.clear();
  data.val_windows.clear();
  for (auto& rec : data.recordings) {
    const double fs = rec.features.fs;
    rec.split = in_stage("split", rec.id,
                         [&] { return split_recording(rec.features.frames, cfg.split, frames_for(cfg.window_s, fs)); });
    auto tw = pipeline::segment_cpis(rec.features, rec.ppg, cfg.window_s, cfg.stride_s, rec.split.train.first,
                                     rec.split.train.second);
    auto vw = pipeline::segment_cpis(rec.features, rec.ppg, cfg.window_s, cfg.stride_s, rec.split.val.first,
                                     rec.split.val.second);
    for (const auto& w : tw)
      if (w.start + w.length() > rec.split.train.second) throw InvalidState("training window crosses the split");
    for (const auto& w : vw)
      if (w.start < rec.split.val.first || w.start + w.length() > rec.split.val.second)
        throw InvalidState("validation window crosses the split");
    std::move(tw.begin(), tw.end(), std::back_inserter(data.train_windows));
    std::move(vw.begin(), vw.end(), std::back_inserter(data.val_windows));
  }
}

TrainedModel fit_model(const ExperimentConfig& cfg, const PreparedData& data, const Logger& log) {
  return in_stage("train", "", [&] {
    const auto stats = model::fit_norm_stats(data.train_windows);
    const auto train_set = model::make_examples(data.train_windows, stats);
    const auto val_set = model::make_examples(data.val_windows, stats);
    note(log, "training on " + std::to_string(train_set.size()) + " windows, validating on " +
                  std::to_string(val_set.size()));
    TrainedModel tm{model::PpgModel<float>(cfg.model), stats, {}};
    tm.result = model::train(tm.model, train_set, val_set, [&](const model::EpochRecord& r) {
      std::ostringstream os;
      os << "epoch " << r.epoch << "/" << cfg.model.epochs << " train_mse " << r.train_mse << " val_mse "
         << r.val_mse << " (" << r.wall_time_s << " s)";
      note(log, os.str());
    });
    return tm;
  });
}

metrics::ScoreReport evaluate(const model::PpgModel<float>& model, const model::NormStats& stats,
                              const std::vector<PreparedRecording>& recordings, double window_s, double stride_s) {
  std::vector<std::string> order;
  std::map<std::string, std::pair<MethodAccumulator, MethodAccumulator>> acc;
  for (const auto& rec : recordings) {
    in_stage("evaluate", rec.id, [&] {
      const double fs = rec.features.fs;
      const auto [b, e] = rec.split.test;
      const auto est = model::predict_stitched(model, stats, rec.features, b, e, frames_for(window_s, fs),
                                               frames_for(stride_s, fs));
      const auto base = metrics::filtering_baseline(rec.features, b, e);
      const std::span<const double> ref(rec.ppg.data() + b, e - b);
      if (!acc.count(rec.scenario)) order.push_back(rec.scenario);
      auto& [m, bl] = acc[rec.scenario];
      m.add(est, ref, fs);
      bl.add(base, ref, fs);
    });
  }
  metrics::ScoreReport report;
  for (const auto& s : order) {
    report.rows.push_back(acc[s].first.row(s, "model"));
    report.rows.push_back(acc[s].second.row(s, "baseline"));
  }
  return report;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const Logger& log) {
  cfg.validate();
  const fs::path out(cfg.output_dir);
  fs::create_directories(out);
  const auto cfg_json = to_json(cfg);
  const auto hash = config_hash(cfg_json);

  auto data = prepare_data(cfg, true, log);
  auto tm = fit_model(cfg, data, log);

  const nlohmann::json seeds{{"sim", cfg.sim_seed}, {"train", cfg.model.seed}};
  model::save_model((out / "model.rvnn").string(), tm.model, tm.stats,
                    {{"config_hash", hash},
                     {"seeds", seeds},
                     {"best_epoch", tm.result.best_epoch},
                     {"split", cfg.split},
                     {"window_s", cfg.window_s},
                     {"stride_s", cfg.stride_s}});
  write_json(out / "history.json", model::history_to_json(tm.result.history));

  ExperimentResult res;
  res.report = evaluate(tm.model, tm.stats, data.recordings, cfg.window_s, cfg.stride_s);
  std::vector<std::string> ids;
  for (const auto& r : data.recordings) ids.push_back(r.id);
  res.report.metadata = {{"config_hash", hash}, {"seeds", seeds}, {"recordings", ids}, {"version", kVersion}};
  metrics::write_report(res.report, (out / "report.json").string(), (out / "report.csv").string());

  res.manifest = {{"version", kVersion},
                  {"config", cfg_json},
                  {"config_hash", hash},
                  {"seeds", seeds},
                  {"recordings", ids},
                  {"train_windows", data.train_windows.size()},
                  {"val_windows", data.val_windows.size()},
                  {"parameter_count", tm.model.parameter_count()},
                  {"best_epoch", tm.result.best_epoch},
                  {"artifacts",
                   {"recordings/", "features/", "model.rvnn", "history.json", "report.json", "report.csv"}}};
  write_json(out / "manifest.json", res.manifest);
  res.history = tm.result.history;
  return res;
}

}  // namespace radarppg::harness
