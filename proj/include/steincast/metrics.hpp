#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steincast/dataset.hpp"
#include "steincast/predict.hpp"
#include "steincast/series.hpp"

namespace steincast {

// sum |y - yhat| / sum |y|. DataError when sum |y| is zero.
double wmape(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat);

// Fraction of points with lo <= y <= hi (closed interval).
double coverage(const Eigen::VectorXd& y, const Eigen::VectorXd& lo,
                const Eigen::VectorXd& hi);

struct MetricReport {
  std::string model_tag;  // MLP | DetNN | BNN-n | ...
  std::int64_t n_windows = 0;
  double wmape_overall = 0.0;
  Eigen::VectorXd wmape_per_horizon;
  double coverage_overall = 0.0;
  Eigen::VectorXd coverage_per_horizon;
};

// Original-scale per-horizon metrics over all windows, plus the across-horizon
// averages. `outputs` must hold one original-scale summary per test window.
MetricReport evaluate(const std::vector<PredictiveSummary>& outputs,
                      const WindowedDataset& test_set, const Transform& transform,
                      std::string model_tag);

struct PredictionRow {
  std::int64_t window_id = 0;
  int horizon = 0;
  double mean = 0, var_model = 0, var_noise = 0, var_total = 0, lo = 0, hi = 0,
         actual = 0;
};

std::vector<PredictionRow> read_predictions_csv(const std::string& path);
MetricReport evaluate_rows(const std::vector<PredictionRow>& rows, std::string model_tag);

void write_metrics_json(const std::string& path, const MetricReport& report);
MetricReport read_metrics_json(const std::string& path);
// columns: horizon,wmape,coverage
void write_per_horizon_csv(const std::string& path, const MetricReport& report);

}  // namespace steincast
