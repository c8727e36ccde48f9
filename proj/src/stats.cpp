#include "smallcell/stats.hpp"

#include <algorithm>
#include <cmath>

#include "smallcell/errors.hpp"

namespace smallcell {

Interval wilson_interval(double p_hat, long long n, double z) {
  if (n < 1) throw InvalidParameter("wilson_interval: n must be >= 1");
  if (!(p_hat >= 0.0 && p_hat <= 1.0))
    throw InvalidParameter("wilson_interval: p_hat must be in [0,1]");
  const double nn = static_cast<double>(n);
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p_hat + z2 / (2.0 * nn)) / denom;
  const double half =
      z * std::sqrt(p_hat * (1.0 - p_hat) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  const std::size_t len = std::max(a.size(), b.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    const double pa = i < a.size() ? a[i] : 0.0;
    const double pb = i < b.size() ? b[i] : 0.0;
    acc += std::abs(pa - pb);
  }
  return 0.5 * acc;
}

double sup_abs_difference(std::span<const double> a,
                          std::span<const double> b) {
  if (a.size() != b.size())
    throw InvalidParameter("sup_abs_difference: length mismatch");
  double sup = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sup = std::max(sup, std::abs(a[i] - b[i]));
  return sup;
}

}  // namespace smallcell
