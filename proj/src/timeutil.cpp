#include "steincast/timeutil.hpp"

#include <cstdio>

#include "steincast/errors.hpp"

namespace steincast {

// Howard Hinnant's civil date algorithms.
std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yr = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yr + (m <= 2));
}

HourStamp hour_stamp(int year, int month, int day, int hour) {
  return days_from_civil(year, month, day) * 24 + hour;
}

namespace {

bool valid_civil(int y, int m, int d) {
  if (m < 1 || m > 12 || d < 1 || d > 31) return false;
  int ry, rm, rd;
  civil_from_days(days_from_civil(y, m, d), ry, rm, rd);
  return ry == y && rm == m && rd == d;
}

}  // namespace

HourStamp parse_hour(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  char sep = 0;
  int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%d", &y, &mo, &d, &sep, &h, &mi, &s);
  if (n < 6 || (sep != 'T' && sep != ' ')) {
    throw DataError("unparseable timestamp '" + text + "'");
  }
  if (!valid_civil(y, mo, d) || h < 0 || h > 23 || mi != 0 || (n == 7 && s != 0)) {
    throw DataError("timestamp '" + text + "' is not a valid whole hour");
  }
  return hour_stamp(y, mo, d, h);
}

HourStamp parse_date(const std::string& text) {
  int y = 0, mo = 0, d = 0;
  char extra = 0;
  int n = std::sscanf(text.c_str(), "%d-%d-%d%c", &y, &mo, &d, &extra);
  if (n != 3 || !valid_civil(y, mo, d)) {
    throw DataError("unparseable date '" + text + "'");
  }
  return hour_stamp(y, mo, d, 0);
}

std::string format_hour(HourStamp t) {
  std::int64_t days = t / 24;
  int hod = static_cast<int>(t % 24);
  if (hod < 0) {
    hod += 24;
    days -= 1;
  }
  int y, m, d;
  civil_from_days(days, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00", y, m, d, hod);
  return buf;
}

std::string format_date(HourStamp t) {
  int y, m, d;
  civil_from_days(midnight_of(t) / 24, y, m, d);
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
  return buf;
}

int hour_of_day(HourStamp t) {
  int h = static_cast<int>(t % 24);
  return h < 0 ? h + 24 : h;
}

int day_of_week(HourStamp t) {
  std::int64_t days = (t - hour_of_day(t)) / 24;
  // 1970-01-01 was a Thursday; Monday = 0.
  int dow = static_cast<int>((days + 3) % 7);
  return dow < 0 ? dow + 7 : dow;
}

HourStamp midnight_of(HourStamp t) { return t - hour_of_day(t); }

}  // namespace steincast
