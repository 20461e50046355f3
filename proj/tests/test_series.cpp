#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"

#include "steincast/errors.hpp"
#include "steincast/series.hpp"

using namespace steincast;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "steincast_series_tests";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("fit_transform rejects constant series") {
  const double e_minus_1 = std::exp(1.0) - 1.0;  // log1p maps it to exactly 1
  CHECK_THROWS_AS(fit_transform({e_minus_1, e_minus_1, e_minus_1}), DataError);
  CHECK_THROWS_AS(fit_transform({}), DataError);
  CHECK_THROWS_AS(fit_transform({1.0, -2.0}), DataError);
}

TEST_CASE("fit_transform statistics on {0, e-1}") {
  // log1p values are {0, 1}: mean 1/2, population std sqrt(((.5)^2+(.5)^2)/2) = 1/2
  const Transform t = fit_transform({0.0, std::exp(1.0) - 1.0});
  CHECK(t.mean == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.std == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(t.forward(0.0) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("transform inverse is the identity on 100 random points") {
  const Transform t = fit_transform({0.0, 3.0, 10.0, 57.0, 240.0});
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mag(-3.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double x = std::pow(10.0, mag(rng)) - 1.0;
    const double back = t.inverse(t.forward(x));
    CHECK(std::abs(back - x) <= 1e-9 * std::max(1.0, std::abs(x)));
  }
  const Transform id = Transform::identity();
  CHECK(id.forward(2.5) == 2.5);
  CHECK(id.inverse(-1.5) == -1.5);
}

TEST_CASE("load_series_csv parses a small valid file") {
  const auto path = temp_file("valid.csv");
  write_text(path,
             "timestamp,value,is_holiday\n"
             "2016-03-01T00:00:00,5.5,0\n"
             "2016-03-01T01:00:00,6,1\n"
             "2016-03-01T02:00:00,0,0\n");
  const SeriesFrame frame = load_series_csv(path.string());
  CHECK(frame.size() == 3);
  CHECK(frame.start == hour_stamp(2016, 3, 1, 0));
  CHECK(frame.values[1] == 6.0);
  CHECK(frame.holiday[1] == 1);
  CHECK(frame.holiday[2] == 0);
}

TEST_CASE("load_series_csv names the offending row") {
  const auto gap = temp_file("gap.csv");
  write_text(gap,
             "timestamp,value,is_holiday\n"
             "2016-03-01T00:00:00,5,0\n"
             "2016-03-01T01:00:00,5,0\n"
             "2016-03-01T03:00:00,5,0\n");
  CHECK_THROWS_WITH_AS(load_series_csv(gap.string()),
                       doctest::Contains("row 4"), DataError);
  CHECK_THROWS_WITH_AS(load_series_csv(gap.string()), doctest::Contains("gap"), DataError);

  const auto dup = temp_file("dup.csv");
  write_text(dup,
             "timestamp,value,is_holiday\n"
             "2016-03-01T00:00:00,5,0\n"
             "2016-03-01T00:00:00,5,0\n");
  CHECK_THROWS_WITH_AS(load_series_csv(dup.string()), doctest::Contains("duplicate"), DataError);

  const auto neg = temp_file("neg.csv");
  write_text(neg,
             "timestamp,value,is_holiday\n"
             "2016-03-01T00:00:00,-2,0\n");
  CHECK_THROWS_WITH_AS(load_series_csv(neg.string()), doctest::Contains("negative"), DataError);

  const auto garbage = temp_file("garbage.csv");
  write_text(garbage,
             "timestamp,value,is_holiday\n"
             "2016-03-01T00:00:00,abc,0\n");
  CHECK_THROWS_AS(load_series_csv(garbage.string()), DataError);

  const auto badheader = temp_file("badheader.csv");
  write_text(badheader, "time,value,holiday\n2016-03-01T00:00:00,1,0\n");
  CHECK_THROWS_AS(load_series_csv(badheader.string()), DataError);
}

TEST_CASE("series csv round trip is byte stable") {
  SeriesFrame frame;
  frame.start = hour_stamp(2017, 11, 23, 5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> value(0.0, 500.0);
  for (int i = 0; i < 48; ++i) {
    frame.values.push_back(value(rng));
    frame.holiday.push_back(i % 7 == 0 ? 1 : 0);
  }
  const auto first = temp_file("round1.csv");
  const auto second = temp_file("round2.csv");
  write_series_csv(frame, first.string());
  write_series_csv(load_series_csv(first.string()), second.string());
  CHECK(read_text(first) == read_text(second));
}
