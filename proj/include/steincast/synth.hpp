#pragma once

#include <cstdint>
#include <vector>

#include "steincast/series.hpp"

namespace steincast {

struct HolidaySpec {
  HourStamp day = 0;        // midnight of the holiday date
  double multiplier = 0.5;  // multiplicative effect on demand that day
};

// Cyclical demand generator. Works in log space: a base level plus daily and
// weekly sinusoids, a log-multiplier on holiday dates, and stationary AR(1)
// noise, exponentiated to positive demand.
struct SynthConfig {
  std::int64_t num_hours = 24 * 365;
  HourStamp start = 0;  // set via hour_stamp/parse_date; 0 = 1970-01-01
  double base_level = 5.0;
  double daily_amplitude = 0.8;
  double weekly_amplitude = 0.25;
  double noise_sigma = 0.08;  // stationary std of the AR(1) log noise
  double ar_coeff = 0.6;
  std::vector<HolidaySpec> holidays;

  void validate() const;  // ConfigError
};

inline constexpr std::int64_t kMinSynthHours = 24 * 28;

// Deterministic in (config, seed).
SeriesFrame generate_synthetic(const SynthConfig& config, std::uint64_t seed);

}  // namespace steincast
