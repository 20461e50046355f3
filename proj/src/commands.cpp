#include "steincast/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <ostream>

#include "json.hpp"

#include "steincast/checkpoint.hpp"
#include "steincast/errors.hpp"
#include "steincast/metrics.hpp"
#include "steincast/predict.hpp"
#include "steincast/svgd.hpp"

namespace steincast {

namespace {

namespace fs = std::filesystem;

void ensure_out_dir(const RunConfig& config) {
  std::error_code ec;
  fs::create_directories(config.eval.out_dir, ec);
  if (ec) {
    throw ConfigError("cannot create output directory '" + config.eval.out_dir +
                      "': " + ec.message());
  }
}

std::string meta_path_for(const std::string& predictions_csv) {
  if (predictions_csv.size() > 4 &&
      predictions_csv.compare(predictions_csv.size() - 4, 4, ".csv") == 0) {
    return predictions_csv.substr(0, predictions_csv.size() - 4) + ".meta.json";
  }
  return predictions_csv + ".meta.json";
}

}  // namespace

std::string cmd_simulate(const RunConfig& config) {
  config.validate();
  if (config.data.kind != "synth") {
    throw ConfigError("simulate requires data kind 'synth'");
  }
  ensure_out_dir(config);
  const SeriesFrame series = generate_synthetic(config.data.synth, config.seed);
  const std::string path = config.eval.out_dir + "/series.csv";
  write_series_csv(series, path);
  return path;
}

TrainArtifacts cmd_train(const RunConfig& config) {
  config.validate();
  ensure_out_dir(config);
  const SeriesFrame series = load_series_csv(config.series_path());
  const PreparedData prepared =
      prepare_dataset(series, config.data.l_in, config.data.horizon, config.data.stride);

  std::shared_ptr<const Network> net;
  std::string model_kind;
  TrainOptions options;
  options.priors = config.priors;
  options.svgd = config.svgd;
  options.svgd.seed = config.seed;
  options.svgd.workers = config.workers;

  std::string tag;
  if (config.model == "bnn") {
    ArchConfig arch = config.arch;
    arch.d = config.data.horizon;
    arch.l_in = config.data.l_in;
    net = std::make_shared<ConvSeqNet>(arch);
    model_kind = "conv";
    options.use_prior = true;
    tag = options.svgd.particles == 1 ? "DetNN-MAP"
                                      : "BNN-" + std::to_string(options.svgd.particles);
  } else if (config.model == "detnn") {
    ArchConfig arch = config.arch;
    arch.d = config.data.horizon;
    arch.l_in = config.data.l_in;
    net = std::make_shared<ConvSeqNet>(arch);
    model_kind = "conv";
    options.use_prior = false;
    options.svgd.particles = 1;
    tag = "DetNN";
  } else {
    MlpConfig mlp = config.mlp;
    mlp.d = config.data.horizon;
    mlp.l_in = config.data.l_in;
    net = std::make_shared<MlpNet>(mlp);
    model_kind = "mlp";
    options.use_prior = false;
    options.svgd.particles = 1;
    tag = "MLP";
  }

  TrainArtifacts artifacts;
  artifacts.log_path = config.eval.out_dir + "/train_log.csv";
  artifacts.checkpoint_base = config.eval.out_dir + "/checkpoint";

  std::ofstream log(artifacts.log_path);
  if (!log) throw DataError("cannot write training log '" + artifacts.log_path + "'");
  log << "# model: " << tag << "\n";
  log << "epoch,train_wmape,val_wmape,mean_log_joint\n";
  options.on_epoch = [&log](const EpochStats& stats) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%d,%.6g,%.6g,%.6g\n", stats.epoch, stats.train_wmape,
                  stats.val_wmape, stats.mean_log_joint);
    log << buf;
    log.flush();
  };
  options.on_checkpoint = [&](int epoch, const ParticleEnsemble& ensemble,
                              const Eigen::MatrixXd& acc) {
    Checkpoint snapshot;
    snapshot.tag = tag;
    snapshot.model_kind = model_kind;
    snapshot.ensemble = ensemble;
    snapshot.accumulators = acc;
    snapshot.transform = prepared.transform;
    snapshot.stride = config.data.stride;
    save_checkpoint(artifacts.checkpoint_base + "_epoch" + std::to_string(epoch + 1), snapshot);
  };

  TrainResult result =
      train(net, prepared.splits.train, prepared.splits.val, prepared.transform, options);

  Checkpoint checkpoint;
  checkpoint.tag = tag;
  checkpoint.model_kind = model_kind;
  checkpoint.ensemble = std::move(result.ensemble);
  checkpoint.accumulators = std::move(result.accumulators);
  checkpoint.transform = prepared.transform;
  checkpoint.stride = config.data.stride;
  save_checkpoint(artifacts.checkpoint_base, checkpoint);
  return artifacts;
}

std::string cmd_predict(const RunConfig& config, const std::string& checkpoint_base,
                        const std::string& split) {
  config.validate();
  if (split != "train" && split != "val" && split != "test") {
    throw ConfigError("split must be train, val, or test");
  }
  ensure_out_dir(config);
  const Checkpoint checkpoint = load_checkpoint(checkpoint_base);
  const SeriesFrame series = load_series_csv(config.series_path());
  const Network& net = *checkpoint.ensemble.net;
  const WindowedDataset all = make_windows(series, checkpoint.transform, net.input_length(),
                                           net.horizon(), checkpoint.stride);
  const SplitDataset splits = split_sequential(all);
  const WindowedDataset& chosen =
      split == "train" ? splits.train : split == "val" ? splits.val : splits.test;
  if (chosen.size() == 0) throw DataError("chosen split '" + split + "' has no windows");

  const std::string path = config.eval.out_dir + "/predictions_" + split + ".csv";
  write_predictions_csv(path, chosen, checkpoint.ensemble, checkpoint.transform,
                        config.eval.level, config.workers);

  nlohmann::json meta;
  meta["model_tag"] = checkpoint.tag;
  meta["level"] = config.eval.level;
  meta["particles"] = checkpoint.ensemble.n();
  meta["split"] = split;
  std::ofstream metafile(meta_path_for(path));
  metafile << meta.dump(2) << '\n';
  return path;
}

EvaluateArtifacts cmd_evaluate(const RunConfig& config, const std::string& predictions_csv,
                               std::optional<std::string> model_tag) {
  config.validate();
  ensure_out_dir(config);
  std::string tag = model_tag.value_or("");
  if (tag.empty()) {
    std::ifstream metafile(meta_path_for(predictions_csv));
    if (metafile) {
      try {
        nlohmann::json meta;
        metafile >> meta;
        tag = meta.at("model_tag").get<std::string>();
      } catch (const nlohmann::json::exception&) {
        tag.clear();
      }
    }
  }
  if (tag.empty()) tag = "unknown";

  const auto rows = read_predictions_csv(predictions_csv);
  const MetricReport report = evaluate_rows(rows, tag);

  EvaluateArtifacts artifacts;
  artifacts.metrics_json = config.eval.out_dir + "/metrics.json";
  artifacts.per_horizon_csv = config.eval.out_dir + "/per_horizon.csv";
  write_metrics_json(artifacts.metrics_json, report);
  write_per_horizon_csv(artifacts.per_horizon_csv, report);
  return artifacts;
}

void cmd_report(const std::string& metrics_json, std::ostream& out) {
  const MetricReport report = read_metrics_json(metrics_json);
  out << "model:    " << report.model_tag << '\n';
  out << "windows:  " << report.n_windows << '\n';
  char buf[128];
  std::snprintf(buf, sizeof(buf), "wmape:    %.6f\ncoverage: %.6f\n", report.wmape_overall,
                report.coverage_overall);
  out << buf;
  out << "horizon   wmape      coverage\n";
  for (std::int64_t j = 0; j < report.wmape_per_horizon.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%-9lld %-10.6f %-10.6f\n", static_cast<long long>(j + 1),
                  report.wmape_per_horizon[j], report.coverage_per_horizon[j]);
    out << buf;
  }
}

}  // namespace steincast
