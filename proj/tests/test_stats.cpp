#include <cmath>

#include "doctest.h"

#include "steincast/errors.hpp"
#include "steincast/stats.hpp"

using namespace steincast;

TEST_CASE("normal quantile matches known values") {
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  // upper 2.5% point of the standard Gaussian
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(normal_quantile(0.84134474606854293) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("normal quantile symmetry and monotonicity") {
  for (double p : {0.01, 0.1, 0.3, 0.45}) {
    CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-12));
  }
  double prev = normal_quantile(0.001);
  for (double p = 0.01; p < 1.0; p += 0.01) {
    const double q = normal_quantile(p);
    CHECK(q > prev);
    prev = q;
  }
}

TEST_CASE("normal quantile rejects out-of-range probabilities") {
  CHECK_THROWS_AS(normal_quantile(0.0), ContractError);
  CHECK_THROWS_AS(normal_quantile(1.0), ContractError);
  CHECK_THROWS_AS(normal_quantile(-0.2), ContractError);
}

TEST_CASE("median handles odd, even, and degenerate inputs") {
  CHECK(median({3.0, 1.0, 2.0}) == 2.0);
  CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
  CHECK(median({7.5}) == 7.5);
  CHECK_THROWS_AS(median({}), ContractError);
}
