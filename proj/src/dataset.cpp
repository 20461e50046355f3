#include "steincast/dataset.hpp"

#include <algorithm>

#include "steincast/errors.hpp"

namespace steincast {

void calendar_features(HourStamp t, bool holiday, Eigen::Ref<Eigen::VectorXd> out) {
  if (out.size() != calendar::kDim) throw ContractError("calendar vector size mismatch");
  out.setZero();
  out[hour_of_day(t)] = 1.0;
  out[calendar::kHourDim + day_of_week(t)] = 1.0;
  out[calendar::kHourDim + calendar::kDayDim] = holiday ? 1.0 : 0.0;
}

HourStamp WindowedDataset::target_stamp(std::int64_t window, int horizon) const {
  return series_start + start_index.at(static_cast<std::size_t>(window)) + l_in + horizon;
}

WindowedDataset WindowedDataset::select(const std::vector<std::int64_t>& rows) const {
  WindowedDataset out;
  out.l_in = l_in;
  out.d = d;
  out.stride = stride;
  out.series_start = series_start;
  out.inputs.reserve(rows.size());
  out.target_calendar.reserve(rows.size());
  out.start_index.reserve(rows.size());
  out.targets.resize(static_cast<std::int64_t>(rows.size()), d);
  std::int64_t k = 0;
  for (std::int64_t r : rows) {
    out.inputs.push_back(inputs.at(static_cast<std::size_t>(r)));
    out.target_calendar.push_back(target_calendar.at(static_cast<std::size_t>(r)));
    out.start_index.push_back(start_index.at(static_cast<std::size_t>(r)));
    out.targets.row(k++) = targets.row(r);
  }
  return out;
}

WindowedDataset make_windows(const SeriesFrame& series, const Transform& transform,
                             int l_in, int d, int stride) {
  series.validate();
  if (l_in < 1 || d < 1 || stride < 1) throw ContractError("l_in, d, stride must be positive");
  const std::int64_t len = static_cast<std::int64_t>(series.size());
  if (len < l_in + d) {
    throw DataError("series too short: " + std::to_string(len) + " hours < l_in + d = " +
                    std::to_string(l_in + d));
  }
  const std::int64_t n = (len - l_in - d) / stride + 1;

  WindowedDataset ds;
  ds.l_in = l_in;
  ds.d = d;
  ds.stride = stride;
  ds.series_start = series.start;
  ds.inputs.reserve(static_cast<std::size_t>(n));
  ds.target_calendar.reserve(static_cast<std::size_t>(n));
  ds.start_index.reserve(static_cast<std::size_t>(n));
  ds.targets.resize(n, d);

  // Transformed demand for the whole series, computed once.
  Eigen::VectorXd z(len);
  for (std::int64_t i = 0; i < len; ++i) {
    z[i] = transform.forward(series.values[static_cast<std::size_t>(i)]);
  }

  const int channels = 1 + calendar::kDim;
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t s = k * stride;
    Eigen::MatrixXd input(channels, l_in);
    for (int t = 0; t < l_in; ++t) {
      const std::int64_t i = s + t;
      input(0, t) = z[i];
      calendar_features(series.stamp_at(static_cast<std::size_t>(i)),
                        series.holiday[static_cast<std::size_t>(i)] != 0,
                        input.col(t).tail(calendar::kDim));
    }
    Eigen::MatrixXd cal(d, calendar::kDim);
    for (int j = 0; j < d; ++j) {
      const std::int64_t i = s + l_in + j;
      Eigen::VectorXd row(calendar::kDim);
      calendar_features(series.stamp_at(static_cast<std::size_t>(i)),
                        series.holiday[static_cast<std::size_t>(i)] != 0, row);
      cal.row(j) = row;
      ds.targets(k, j) = z[i];
    }
    ds.inputs.push_back(std::move(input));
    ds.target_calendar.push_back(std::move(cal));
    ds.start_index.push_back(s);
  }
  return ds;
}

std::array<std::int64_t, 3> split_sizes(std::int64_t n) {
  const std::int64_t train = n / 2;
  const std::int64_t val = n / 4;
  return {train, val, n - train - val};
}

SplitDataset split_sequential(const WindowedDataset& dataset) {
  const std::int64_t n = dataset.size();
  if (n < 4) throw DataError("need at least 4 windows to split, got " + std::to_string(n));
  const auto sizes = split_sizes(n);

  const std::int64_t val_begin = sizes[0];
  const std::int64_t test_begin = sizes[0] + sizes[1];
  const std::int64_t first_val_hour = dataset.start_index[static_cast<std::size_t>(val_begin)];
  const std::int64_t first_test_hour = dataset.start_index[static_cast<std::size_t>(test_begin)];
  const std::int64_t span = dataset.l_in + dataset.d;

  // A window owns hours [s, s + l_in + d); drop windows reaching into the
  // next split's hours so split hour ranges are disjoint.
  std::vector<std::int64_t> train_rows, val_rows, test_rows;
  for (std::int64_t k = 0; k < val_begin; ++k) {
    if (dataset.start_index[static_cast<std::size_t>(k)] + span <= first_val_hour) {
      train_rows.push_back(k);
    }
  }
  for (std::int64_t k = val_begin; k < test_begin; ++k) {
    if (dataset.start_index[static_cast<std::size_t>(k)] + span <= first_test_hour) {
      val_rows.push_back(k);
    }
  }
  for (std::int64_t k = test_begin; k < n; ++k) test_rows.push_back(k);

  SplitDataset out;
  out.train = dataset.select(train_rows);
  out.val = dataset.select(val_rows);
  out.test = dataset.select(test_rows);
  return out;
}

PreparedData prepare_dataset(const SeriesFrame& series, int l_in, int d, int stride) {
  series.validate();
  const std::int64_t len = static_cast<std::int64_t>(series.size());
  if (len < l_in + d) {
    throw DataError("series too short: " + std::to_string(len) + " hours < l_in + d = " +
                    std::to_string(l_in + d));
  }
  const std::int64_t n = (len - l_in - d) / stride + 1;
  const auto sizes = split_sizes(n);
  // Hours strictly before the first validation window are owned by train.
  const std::int64_t train_hours = sizes[0] * static_cast<std::int64_t>(stride);
  std::vector<double> train_values(series.values.begin(),
                                   series.values.begin() + train_hours);

  PreparedData out;
  out.transform = fit_transform(train_values);
  out.splits = split_sequential(make_windows(series, out.transform, l_in, d, stride));
  return out;
}

}  // namespace steincast
