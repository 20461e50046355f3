#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "steincast/config.hpp"

namespace steincast {

// Subcommand bodies; errors propagate as the exception types in errors.hpp.

// Generates the synthetic series and writes <out>/series.csv; returns the path.
std::string cmd_simulate(const RunConfig& config);

struct TrainArtifacts {
  std::string checkpoint_base;  // <out>/checkpoint
  std::string log_path;         // <out>/train_log.csv
};
// Full data pipeline + training; logs per-epoch train/val WMAPE and the mean
// log joint; writes the final checkpoint.
TrainArtifacts cmd_train(const RunConfig& config);

// Predictions CSV for every window of the chosen split (train|val|test).
std::string cmd_predict(const RunConfig& config, const std::string& checkpoint_base,
                        const std::string& split);

struct EvaluateArtifacts {
  std::string metrics_json;
  std::string per_horizon_csv;
};
EvaluateArtifacts cmd_evaluate(const RunConfig& config, const std::string& predictions_csv,
                               std::optional<std::string> model_tag = std::nullopt);

// Human-readable summary of a metrics JSON.
void cmd_report(const std::string& metrics_json, std::ostream& out);

}  // namespace steincast
