#include <cmath>
#include <vector>

#include "doctest.h"

#include "steincast/errors.hpp"
#include "steincast/synth.hpp"

using namespace steincast;

namespace {

SynthConfig quiet_config() {
  SynthConfig config;
  config.num_hours = 24 * 35;
  config.start = hour_stamp(2016, 1, 1, 0);
  config.base_level = 3.0;
  config.daily_amplitude = 0.6;
  config.weekly_amplitude = 0.0;
  config.noise_sigma = 0.0;
  config.ar_coeff = 0.0;
  return config;
}

}  // namespace

TEST_CASE("noise-free generator without holidays is exactly 24h periodic") {
  const SeriesFrame frame = generate_synthetic(quiet_config(), 1);
  for (std::size_t i = 0; i + 24 < frame.size(); ++i) {
    CHECK(frame.values[i] == frame.values[i + 24]);
  }
}

TEST_CASE("generator is deterministic in (config, seed)") {
  SynthConfig config = quiet_config();
  config.noise_sigma = 0.1;
  config.ar_coeff = 0.6;
  const SeriesFrame a = generate_synthetic(config, 1);
  const SeriesFrame b = generate_synthetic(config, 1);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.values[i] == b.values[i]);

  const SeriesFrame c = generate_synthetic(config, 2);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i) any_diff = any_diff || a.values[i] != c.values[i];
  CHECK(any_diff);
}

TEST_CASE("holiday multiplier scales the holiday-day mean against matched weekdays") {
  SynthConfig config = quiet_config();
  config.num_hours = 24 * 7 * 8;
  config.noise_sigma = 0.02;
  config.ar_coeff = 0.0;
  config.weekly_amplitude = 0.2;
  const HourStamp holiday = hour_stamp(2016, 1, 22, 0);  // a Friday in week 4
  config.holidays = {{holiday, 0.5}};
  const SeriesFrame frame = generate_synthetic(config, 5);

  auto day_mean = [&](HourStamp day_start) {
    double sum = 0.0;
    for (int h = 0; h < 24; ++h) {
      sum += frame.values[static_cast<std::size_t>(day_start - frame.start + h)];
    }
    return sum / 24.0;
  };

  const double holiday_mean = day_mean(holiday);
  double matched = 0.0;
  int matched_count = 0;
  for (HourStamp day = frame.start; day < frame.start + config.num_hours; day += 24) {
    if (day_of_week(day) == day_of_week(holiday) && day != holiday) {
      matched += day_mean(day);
      ++matched_count;
    }
  }
  REQUIRE(matched_count > 0);
  matched /= matched_count;
  CHECK(holiday_mean / matched == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("holiday flags are set exactly on configured dates") {
  SynthConfig config = quiet_config();
  const HourStamp day = hour_stamp(2016, 1, 15, 0);
  config.holidays = {{day, 0.7}};
  const SeriesFrame frame = generate_synthetic(config, 1);
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const bool expected = midnight_of(frame.stamp_at(i)) == day;
    CHECK(static_cast<bool>(frame.holiday[i]) == expected);
  }
}

TEST_CASE("generator rejects bad configs") {
  SynthConfig too_short = quiet_config();
  too_short.num_hours = 24 * 10;
  CHECK_THROWS_AS(generate_synthetic(too_short, 1), ConfigError);

  SynthConfig outside = quiet_config();
  outside.holidays = {{hour_stamp(2030, 1, 1, 0), 0.5}};
  CHECK_THROWS_AS(generate_synthetic(outside, 1), ConfigError);

  SynthConfig bad_ar = quiet_config();
  bad_ar.ar_coeff = 1.0;
  CHECK_THROWS_AS(generate_synthetic(bad_ar, 1), ConfigError);

  SynthConfig bad_mult = quiet_config();
  bad_mult.holidays = {{hour_stamp(2016, 1, 15, 0), 0.0}};
  CHECK_THROWS_AS(generate_synthetic(bad_mult, 1), ConfigError);
}
