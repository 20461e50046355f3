#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "steincast/timeutil.hpp"

namespace steincast {

// Hourly demand series with per-hour holiday flags. Hours are contiguous
// starting at `start`; values are nonnegative.
struct SeriesFrame {
  HourStamp start = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> holiday;

  std::size_t size() const { return values.size(); }
  HourStamp stamp_at(std::size_t i) const { return start + static_cast<HourStamp>(i); }
  void validate() const;  // DataError on violated invariants
};

// CSV with header `timestamp,value,is_holiday`; gaps, duplicates, negative
// values and unparseable rows raise DataError naming the offending row.
SeriesFrame load_series_csv(const std::string& path);
void write_series_csv(const SeriesFrame& frame, const std::string& path);

// Gaussianizing transform z = (log1p(v) - mean) / std with statistics taken
// from the train split only. The identity kind exists for tests and toys.
struct Transform {
  enum class Kind { Log1pZscore, Identity };
  Kind kind = Kind::Log1pZscore;
  double mean = 0.0;
  double std = 1.0;

  double forward(double v) const;
  double inverse(double z) const;
  Eigen::VectorXd forward(const Eigen::VectorXd& v) const;
  Eigen::VectorXd inverse(const Eigen::VectorXd& z) const;

  static Transform identity();
};

// Mean and population std of log1p(values). DataError when empty, negative,
// or constant (std would be zero).
Transform fit_transform(const std::vector<double>& train_values);

}  // namespace steincast
