#include "steincast/synth.hpp"

#include <cmath>
#include <random>
#include <unordered_map>

#include "steincast/errors.hpp"

namespace steincast {

void SynthConfig::validate() const {
  if (num_hours < kMinSynthHours) {
    throw ConfigError("num_hours must be at least " + std::to_string(kMinSynthHours) +
                      ", got " + std::to_string(num_hours));
  }
  if (!(noise_sigma >= 0.0)) throw ConfigError("noise_sigma must be nonnegative");
  if (!(std::abs(ar_coeff) < 1.0)) throw ConfigError("ar_coeff must lie in (-1, 1)");
  if (!(daily_amplitude >= 0.0) || !(weekly_amplitude >= 0.0)) {
    throw ConfigError("amplitudes must be nonnegative");
  }
  for (const auto& h : holidays) {
    if (h.day % 24 != 0 && midnight_of(h.day) != h.day) {
      throw ConfigError("holiday " + format_hour(h.day) + " is not a date");
    }
    if (h.day < midnight_of(start) || h.day >= start + num_hours) {
      throw ConfigError("holiday " + format_date(h.day) + " outside the generated range");
    }
    if (!(h.multiplier > 0.0)) throw ConfigError("holiday multiplier must be positive");
  }
}

SeriesFrame generate_synthetic(const SynthConfig& config, std::uint64_t seed) {
  config.validate();

  std::unordered_map<HourStamp, double> holiday_log;
  for (const auto& h : config.holidays) {
    holiday_log[midnight_of(h.day)] = std::log(h.multiplier);
  }

  constexpr double kTwoPi = 6.283185307179586476925286766559;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double innovation =
      config.noise_sigma * std::sqrt(1.0 - config.ar_coeff * config.ar_coeff);

  SeriesFrame frame;
  frame.start = config.start;
  frame.values.resize(config.num_hours);
  frame.holiday.resize(config.num_hours);

  double ar = 0.0;
  for (std::int64_t i = 0; i < config.num_hours; ++i) {
    const HourStamp t = config.start + i;
    const int hod = hour_of_day(t);
    const int how = hod + 24 * day_of_week(t);

    // Stationary AR(1): first draw at the stationary scale.
    if (config.noise_sigma > 0.0) {
      const double z = gauss(rng);
      ar = i == 0 ? config.noise_sigma * z : config.ar_coeff * ar + innovation * z;
    }

    double log_value = config.base_level +
                       config.daily_amplitude * std::sin(kTwoPi * hod / 24.0) +
                       config.weekly_amplitude * std::sin(kTwoPi * how / 168.0) + ar;
    const auto it = holiday_log.find(midnight_of(t));
    const bool is_holiday = it != holiday_log.end();
    if (is_holiday) log_value += it->second;

    frame.values[static_cast<std::size_t>(i)] = std::exp(log_value);
    frame.holiday[static_cast<std::size_t>(i)] = is_holiday ? 1 : 0;
  }
  return frame;
}

}  // namespace steincast
