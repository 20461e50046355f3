#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "steincast/series.hpp"

namespace steincast {

// Calendar channel layout: hour-of-day one-hot, day-of-week one-hot, holiday flag.
namespace calendar {
inline constexpr int kHourDim = 24;
inline constexpr int kDayDim = 7;
inline constexpr int kHolidayDim = 1;
inline constexpr int kDim = kHourDim + kDayDim + kHolidayDim;
}  // namespace calendar

// Writes the calendar::kDim feature vector for one hour into `out`.
void calendar_features(HourStamp t, bool holiday, Eigen::Ref<Eigen::VectorXd> out);

// Supervised sliding windows: per window a (1 + calendar::kDim) x l_in input
// (transformed demand channel first), a d-vector target in transformed scale,
// and the calendar vectors at the d prediction hours.
struct WindowedDataset {
  int l_in = 144;
  int d = 6;
  int stride = 1;
  HourStamp series_start = 0;
  std::vector<Eigen::MatrixXd> inputs;           // channels x l_in
  Eigen::MatrixXd targets;                       // N x d
  std::vector<Eigen::MatrixXd> target_calendar;  // d x calendar::kDim
  std::vector<std::int64_t> start_index;         // window start in the source series

  int channels() const { return 1 + calendar::kDim; }
  std::int64_t size() const { return static_cast<std::int64_t>(inputs.size()); }
  HourStamp target_stamp(std::int64_t window, int horizon) const;
  WindowedDataset select(const std::vector<std::int64_t>& rows) const;
};

// N = floor((len - l_in - d) / stride) + 1 windows; DataError when the series
// is shorter than l_in + d.
WindowedDataset make_windows(const SeriesFrame& series, const Transform& transform,
                             int l_in = 144, int d = 6, int stride = 1);

// Window counts per split before straddle-dropping: floor(N/2), floor(N/4), rest.
std::array<std::int64_t, 3> split_sizes(std::int64_t n);

struct SplitDataset {
  WindowedDataset train, val, test;
};

// Sequential 50/25/25 split by window start time. Windows whose target hours
// reach into the next split's input hours are dropped from train and val, so
// the hour ranges of consecutive splits do not overlap.
SplitDataset split_sequential(const WindowedDataset& dataset);

struct PreparedData {
  Transform transform;
  SplitDataset splits;
};

// Fits the transform on the hours owned by the train split, then windows the
// whole series with it and splits sequentially.
PreparedData prepare_dataset(const SeriesFrame& series, int l_in = 144, int d = 6,
                             int stride = 1);

}  // namespace steincast
