#include "steincast/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

#include "steincast/errors.hpp"

namespace steincast {

double wmape(const Eigen::VectorXd& y, const Eigen::VectorXd& yhat) {
  if (y.size() != yhat.size()) throw ContractError("wmape length mismatch");
  if (y.size() == 0) throw ContractError("wmape of empty vectors");
  const double denom = y.cwiseAbs().sum();
  if (!(denom > 0.0)) throw DataError("wmape undefined: sum |y| is zero");
  return (y - yhat).cwiseAbs().sum() / denom;
}

double coverage(const Eigen::VectorXd& y, const Eigen::VectorXd& lo,
                const Eigen::VectorXd& hi) {
  if (y.size() != lo.size() || y.size() != hi.size()) {
    throw ContractError("coverage length mismatch");
  }
  if (y.size() == 0) throw ContractError("coverage of empty vectors");
  std::int64_t inside = 0;
  for (std::int64_t i = 0; i < y.size(); ++i) {
    if (lo[i] > hi[i]) {
      throw ContractError("interval with lo > hi at index " + std::to_string(i));
    }
    if (lo[i] <= y[i] && y[i] <= hi[i]) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(y.size());
}

MetricReport evaluate(const std::vector<PredictiveSummary>& outputs,
                      const WindowedDataset& test_set, const Transform& transform,
                      std::string model_tag) {
  const std::int64_t n = test_set.size();
  if (static_cast<std::int64_t>(outputs.size()) != n) {
    std::string missing;
    for (std::int64_t k = static_cast<std::int64_t>(outputs.size()); k < n && missing.size() < 80;
         ++k) {
      missing += (missing.empty() ? "" : ",") + std::to_string(k);
    }
    throw ContractError("predictions missing for windows [" + missing + "]");
  }
  if (n == 0) throw ContractError("evaluate on empty test set");

  const int d = test_set.d;
  MetricReport report;
  report.model_tag = std::move(model_tag);
  report.n_windows = n;
  report.wmape_per_horizon.resize(d);
  report.coverage_per_horizon.resize(d);

  Eigen::VectorXd y(n), yhat(n), lo(n), hi(n);
  for (int j = 0; j < d; ++j) {
    for (std::int64_t k = 0; k < n; ++k) {
      y[k] = transform.inverse(test_set.targets(k, j));
      yhat[k] = outputs[static_cast<std::size_t>(k)].mean[j];
      lo[k] = outputs[static_cast<std::size_t>(k)].lo[j];
      hi[k] = outputs[static_cast<std::size_t>(k)].hi[j];
    }
    report.wmape_per_horizon[j] = wmape(y, yhat);
    report.coverage_per_horizon[j] = coverage(y, lo, hi);
  }
  report.wmape_overall = report.wmape_per_horizon.mean();
  report.coverage_overall = report.coverage_per_horizon.mean();
  return report;
}

std::vector<PredictionRow> read_predictions_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open predictions file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "window_id,horizon,mean,var_model,var_noise,var_total,lo95,hi95,actual") {
    throw DataError(path + ": unexpected predictions header");
  }
  std::vector<PredictionRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    double fields[9];
    int count = 0;
    while (std::getline(ss, field, ',') && count < 9) {
      char* end = nullptr;
      fields[count] = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw DataError(path + ": row " + std::to_string(line_no) + ": bad field '" + field +
                        "'");
      }
      ++count;
    }
    if (count != 9) {
      throw DataError(path + ": row " + std::to_string(line_no) + ": expected 9 fields");
    }
    PredictionRow row;
    row.window_id = static_cast<std::int64_t>(fields[0]);
    row.horizon = static_cast<int>(fields[1]);
    row.mean = fields[2];
    row.var_model = fields[3];
    row.var_noise = fields[4];
    row.var_total = fields[5];
    row.lo = fields[6];
    row.hi = fields[7];
    row.actual = fields[8];
    if (row.horizon < 1) {
      throw DataError(path + ": row " + std::to_string(line_no) + ": horizon must be >= 1");
    }
    rows.push_back(row);
  }
  if (rows.empty()) throw DataError(path + ": no prediction rows");
  return rows;
}

MetricReport evaluate_rows(const std::vector<PredictionRow>& rows, std::string model_tag) {
  if (rows.empty()) throw ContractError("no prediction rows to evaluate");
  int d = 0;
  for (const auto& row : rows) d = std::max(d, row.horizon);
  std::map<std::int64_t, int> horizons_seen;
  for (const auto& row : rows) ++horizons_seen[row.window_id];
  for (const auto& [id, count] : horizons_seen) {
    if (count != d) {
      throw DataError("window " + std::to_string(id) + " has " + std::to_string(count) +
                      " rows, expected " + std::to_string(d));
    }
  }

  MetricReport report;
  report.model_tag = std::move(model_tag);
  report.n_windows = static_cast<std::int64_t>(horizons_seen.size());
  report.wmape_per_horizon.resize(d);
  report.coverage_per_horizon.resize(d);
  for (int j = 1; j <= d; ++j) {
    std::vector<double> y, yhat, lo, hi;
    for (const auto& row : rows) {
      if (row.horizon != j) continue;
      y.push_back(row.actual);
      yhat.push_back(row.mean);
      lo.push_back(row.lo);
      hi.push_back(row.hi);
    }
    const auto n = static_cast<std::int64_t>(y.size());
    report.wmape_per_horizon[j - 1] =
        wmape(Eigen::Map<const Eigen::VectorXd>(y.data(), n),
              Eigen::Map<const Eigen::VectorXd>(yhat.data(), n));
    report.coverage_per_horizon[j - 1] =
        coverage(Eigen::Map<const Eigen::VectorXd>(y.data(), n),
                 Eigen::Map<const Eigen::VectorXd>(lo.data(), n),
                 Eigen::Map<const Eigen::VectorXd>(hi.data(), n));
  }
  report.wmape_overall = report.wmape_per_horizon.mean();
  report.coverage_overall = report.coverage_per_horizon.mean();
  return report;
}

void write_metrics_json(const std::string& path, const MetricReport& report) {
  nlohmann::json j;
  j["model_tag"] = report.model_tag;
  j["n_windows"] = report.n_windows;
  j["wmape"]["overall"] = report.wmape_overall;
  j["wmape"]["per_horizon"] =
      std::vector<double>(report.wmape_per_horizon.data(),
                          report.wmape_per_horizon.data() + report.wmape_per_horizon.size());
  j["coverage"]["overall"] = report.coverage_overall;
  j["coverage"]["per_horizon"] = std::vector<double>(
      report.coverage_per_horizon.data(),
      report.coverage_per_horizon.data() + report.coverage_per_horizon.size());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write metrics file '" + path + "'");
  out << j.dump(2) << '\n';
}

MetricReport read_metrics_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metrics file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  try {
    MetricReport report;
    report.model_tag = j.at("model_tag").get<std::string>();
    report.n_windows = j.at("n_windows").get<std::int64_t>();
    report.wmape_overall = j.at("wmape").at("overall").get<double>();
    report.coverage_overall = j.at("coverage").at("overall").get<double>();
    const auto wv = j.at("wmape").at("per_horizon").get<std::vector<double>>();
    const auto cv = j.at("coverage").at("per_horizon").get<std::vector<double>>();
    report.wmape_per_horizon =
        Eigen::Map<const Eigen::VectorXd>(wv.data(), static_cast<std::int64_t>(wv.size()));
    report.coverage_per_horizon =
        Eigen::Map<const Eigen::VectorXd>(cv.data(), static_cast<std::int64_t>(cv.size()));
    return report;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": metrics schema mismatch: " + e.what());
  }
}

void write_per_horizon_csv(const std::string& path, const MetricReport& report) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write per-horizon file '" + path + "'");
  out << "horizon,wmape,coverage\n";
  char buf[128];
  for (std::int64_t j = 0; j < report.wmape_per_horizon.size(); ++j) {
    std::snprintf(buf, sizeof(buf), "%lld,%.17g,%.17g\n", static_cast<long long>(j + 1),
                  report.wmape_per_horizon[j], report.coverage_per_horizon[j]);
    out << buf;
  }
}

}  // namespace steincast
