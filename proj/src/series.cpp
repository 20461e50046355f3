#include "steincast/series.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "steincast/errors.hpp"

namespace steincast {

void SeriesFrame::validate() const {
  if (values.size() != holiday.size()) {
    throw DataError("series value/holiday length mismatch");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0)) {
      throw DataError("negative or non-finite demand at hour " + format_hour(stamp_at(i)));
    }
  }
}

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

SeriesFrame load_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open series file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path + ": empty file");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "timestamp,value,is_holiday") {
    throw DataError(path + ": expected header 'timestamp,value,is_holiday', got '" + line + "'");
  }

  SeriesFrame frame;
  std::size_t row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw DataError(path + ": row " + std::to_string(row) + ": expected 3 fields");
    }
    HourStamp stamp;
    try {
      stamp = parse_hour(line.substr(0, c1));
    } catch (const DataError& e) {
      throw DataError(path + ": row " + std::to_string(row) + ": " + e.what());
    }
    const std::string value_text = line.substr(c1 + 1, c2 - c1 - 1);
    char* end = nullptr;
    const double value = std::strtod(value_text.c_str(), &end);
    if (end == value_text.c_str() || *end != '\0' || !std::isfinite(value)) {
      throw DataError(path + ": row " + std::to_string(row) + ": unparseable value '" +
                      value_text + "'");
    }
    if (value < 0.0) {
      throw DataError(path + ": row " + std::to_string(row) + ": negative value");
    }
    const std::string flag_text = line.substr(c2 + 1);
    if (flag_text != "0" && flag_text != "1") {
      throw DataError(path + ": row " + std::to_string(row) + ": is_holiday must be 0 or 1");
    }

    if (frame.values.empty()) {
      frame.start = stamp;
    } else {
      const HourStamp expected = frame.start + static_cast<HourStamp>(frame.values.size());
      if (stamp == expected - 1) {
        throw DataError(path + ": row " + std::to_string(row) + ": duplicate timestamp " +
                        format_hour(stamp));
      }
      if (stamp != expected) {
        throw DataError(path + ": row " + std::to_string(row) + ": gap in timestamps, expected " +
                        format_hour(expected) + " got " + format_hour(stamp));
      }
    }
    frame.values.push_back(value);
    frame.holiday.push_back(flag_text == "1" ? 1 : 0);
  }
  if (frame.values.empty()) throw DataError(path + ": no data rows");
  frame.validate();
  return frame;
}

void write_series_csv(const SeriesFrame& frame, const std::string& path) {
  frame.validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot write series file '" + path + "'");
  out << "timestamp,value,is_holiday\n";
  for (std::size_t i = 0; i < frame.size(); ++i) {
    out << format_hour(frame.stamp_at(i)) << ',' << fmt_double(frame.values[i]) << ','
        << (frame.holiday[i] ? '1' : '0') << '\n';
  }
  if (!out) throw DataError("write failed for '" + path + "'");
}

double Transform::forward(double v) const {
  if (kind == Kind::Identity) return v;
  return (std::log1p(v) - mean) / std;
}

double Transform::inverse(double z) const {
  if (kind == Kind::Identity) return z;
  return std::expm1(z * std + mean);
}

Eigen::VectorXd Transform::forward(const Eigen::VectorXd& v) const {
  return v.unaryExpr([this](double x) { return forward(x); });
}

Eigen::VectorXd Transform::inverse(const Eigen::VectorXd& z) const {
  return z.unaryExpr([this](double x) { return inverse(x); });
}

Transform Transform::identity() {
  Transform t;
  t.kind = Kind::Identity;
  return t;
}

Transform fit_transform(const std::vector<double>& train_values) {
  if (train_values.empty()) throw DataError("fit_transform on empty values");
  double sum = 0.0;
  for (double v : train_values) {
    if (!(v >= 0.0)) throw DataError("fit_transform requires nonnegative values");
    sum += std::log1p(v);
  }
  const double n = static_cast<double>(train_values.size());
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : train_values) {
    const double r = std::log1p(v) - mean;
    ss += r * r;
  }
  const double std = std::sqrt(ss / n);
  if (!(std > 0.0)) {
    throw DataError("constant series: transform std would be zero");
  }
  Transform t;
  t.mean = mean;
  t.std = std;
  return t;
}

}  // namespace steincast
