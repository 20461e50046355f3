#include <algorithm>
#include <cmath>

#include "doctest.h"

#include "steincast/dataset.hpp"
#include "steincast/errors.hpp"
#include "steincast/synth.hpp"

using namespace steincast;

namespace {

SeriesFrame small_series(std::int64_t hours, std::uint64_t seed = 3) {
  SynthConfig config;
  config.num_hours = std::max<std::int64_t>(hours, kMinSynthHours);
  config.start = hour_stamp(2016, 1, 1, 0);
  config.base_level = 3.0;
  config.daily_amplitude = 0.5;
  config.weekly_amplitude = 0.1;
  config.noise_sigma = 0.05;
  config.ar_coeff = 0.3;
  SeriesFrame frame = generate_synthetic(config, seed);
  frame.values.resize(static_cast<std::size_t>(hours));
  frame.holiday.resize(static_cast<std::size_t>(hours));
  return frame;
}

}  // namespace

TEST_CASE("calendar features are one-hot per block") {
  Eigen::VectorXd v(calendar::kDim);
  const HourStamp t = hour_stamp(2016, 6, 15, 17);
  calendar_features(t, true, v);
  CHECK(v.head(calendar::kHourDim).sum() == 1.0);
  CHECK(v.segment(calendar::kHourDim, calendar::kDayDim).sum() == 1.0);
  CHECK(v[calendar::kDim - 1] == 1.0);
  CHECK(v[17] == 1.0);  // hour of day block
  calendar_features(t, false, v);
  CHECK(v[calendar::kDim - 1] == 0.0);
  for (std::int64_t i = 0; i < v.size(); ++i) CHECK((v[i] == 0.0 || v[i] == 1.0));
}

TEST_CASE("window count formula") {
  const int l_in = 10, d = 3;
  const SeriesFrame exact = small_series(l_in + d);
  const Transform t = fit_transform(exact.values);
  CHECK(make_windows(exact, t, l_in, d).size() == 1);

  const SeriesFrame plus5 = small_series(l_in + d + 5);
  CHECK(make_windows(plus5, fit_transform(plus5.values), l_in, d).size() == 6);
  CHECK(make_windows(plus5, fit_transform(plus5.values), l_in, d, 2).size() == 3);

  const SeriesFrame too_short = small_series(l_in + d - 1);
  CHECK_THROWS_AS(make_windows(too_short, t, l_in, d), DataError);
}

TEST_CASE("window contents match the source series") {
  const int l_in = 12, d = 4;
  const SeriesFrame series = small_series(80);
  const Transform t = fit_transform(series.values);
  const WindowedDataset ds = make_windows(series, t, l_in, d);

  for (std::int64_t k : {std::int64_t(0), std::int64_t(7), ds.size() - 1}) {
    const auto& input = ds.inputs[static_cast<std::size_t>(k)];
    REQUIRE(input.rows() == 1 + calendar::kDim);
    REQUIRE(input.cols() == l_in);
    for (int tt = 0; tt < l_in; ++tt) {
      CHECK(input(0, tt) == t.forward(series.values[static_cast<std::size_t>(k + tt)]));
      // one-hot blocks sum to one at every time step
      CHECK(input.col(tt).segment(1, calendar::kHourDim).sum() == 1.0);
      CHECK(input.col(tt).segment(1 + calendar::kHourDim, calendar::kDayDim).sum() == 1.0);
    }
    for (int j = 0; j < d; ++j) {
      CHECK(ds.targets(k, j) == t.forward(series.values[static_cast<std::size_t>(k + l_in + j)]));
      CHECK(ds.target_stamp(k, j) == series.stamp_at(static_cast<std::size_t>(k + l_in + j)));
    }
    // input hours end strictly before target hours
    const auto s = static_cast<std::size_t>(ds.start_index[static_cast<std::size_t>(k)]);
    CHECK(series.stamp_at(s + l_in - 1) < ds.target_stamp(k, 0));
  }
}

TEST_CASE("split sizes follow the 50/25/25 rule") {
  CHECK(split_sizes(100) == std::array<std::int64_t, 3>{50, 25, 25});
  CHECK(split_sizes(4) == std::array<std::int64_t, 3>{2, 1, 1});
  CHECK(split_sizes(101) == std::array<std::int64_t, 3>{50, 25, 26});
}

TEST_CASE("sequential split drops straddling windows") {
  const int l_in = 12, d = 4;
  const SeriesFrame series = small_series(700);
  const PreparedData prepared = prepare_dataset(series, l_in, d);
  const auto& splits = prepared.splits;

  REQUIRE(splits.train.size() > 0);
  REQUIRE(splits.val.size() > 0);
  REQUIRE(splits.test.size() > 0);

  const std::int64_t max_train_target =
      splits.train.start_index.back() + l_in + d - 1;
  const std::int64_t min_val_input = splits.val.start_index.front();
  CHECK(max_train_target < min_val_input);

  const std::int64_t max_val_target = splits.val.start_index.back() + l_in + d - 1;
  const std::int64_t min_test_input = splits.test.start_index.front();
  CHECK(max_val_target < min_test_input);

  // split sizes before dropping cover all windows
  const std::int64_t n = (700 - l_in - d) + 1;
  const auto sizes = split_sizes(n);
  CHECK(splits.test.size() == sizes[2]);
  CHECK(splits.train.size() == sizes[0] - (l_in + d - 1));
  CHECK(splits.val.size() == sizes[1] - (l_in + d - 1));

  CHECK_THROWS_AS(split_sequential(make_windows(small_series(l_in + d + 1),
                                                prepared.transform, l_in, d)),
                  DataError);
}

TEST_CASE("prepare_dataset fits the transform on train hours only") {
  const int l_in = 12, d = 4;
  const SeriesFrame series = small_series(700);
  const PreparedData prepared = prepare_dataset(series, l_in, d);

  const std::int64_t n = (700 - l_in - d) + 1;
  const std::int64_t train_hours = split_sizes(n)[0];
  const Transform expected = fit_transform(
      std::vector<double>(series.values.begin(), series.values.begin() + train_hours));
  CHECK(prepared.transform.mean == expected.mean);
  CHECK(prepared.transform.std == expected.std);

  // a test window still uses the train-fitted statistics
  const auto& test = prepared.splits.test;
  const auto k = static_cast<std::size_t>(test.size() / 2);
  const auto s = static_cast<std::size_t>(test.start_index[k]);
  CHECK(test.inputs[k](0, 0) == expected.forward(series.values[s]));
}
