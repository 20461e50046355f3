#pragma once

#include <cstdint>
#include <string>

namespace steincast {

// Naive UTC hours since 1970-01-01T00:00:00.
using HourStamp = std::int64_t;

std::int64_t days_from_civil(int year, int month, int day);
void civil_from_days(std::int64_t days, int& year, int& month, int& day);

HourStamp hour_stamp(int year, int month, int day, int hour);

// "YYYY-MM-DDTHH:MM[:SS]"; throws DataError on anything else.
HourStamp parse_hour(const std::string& text);
// "YYYY-MM-DD", taken at midnight.
HourStamp parse_date(const std::string& text);

std::string format_hour(HourStamp t);
std::string format_date(HourStamp t);

int hour_of_day(HourStamp t);
int day_of_week(HourStamp t);  // 0 = Monday .. 6 = Sunday
HourStamp midnight_of(HourStamp t);

}  // namespace steincast
