#pragma once

#include <cstddef>
#include <vector>

namespace lowdisc {

struct LinearFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept. Needs two distinct x.
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

// least_squares on (log2 x, log2 y); every value must be positive.
LinearFit log2_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace lowdisc
