#pragma once

#include <vector>

namespace steincast {

// Standard normal quantile, Wichura's AS 241 rational approximations
// (accurate to full double precision). Requires 0 < p < 1.
double normal_quantile(double p);

// Median of v; even lengths average the two middle elements. Throws on empty.
double median(std::vector<double> v);

}  // namespace steincast
