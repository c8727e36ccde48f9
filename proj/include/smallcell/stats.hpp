#pragma once

#include <span>

namespace smallcell {

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

/// Wilson score interval for a binomial proportion (default 95%).
Interval wilson_interval(double p_hat, long long n,
                         double z = 1.959963984540054);

/// Total-variation distance between two finite pmfs (shorter one padded with
/// zeros).
double total_variation(std::span<const double> a, std::span<const double> b);

/// Largest absolute pointwise difference between two equally long sequences.
double sup_abs_difference(std::span<const double> a,
                          std::span<const double> b);

}  // namespace smallcell
