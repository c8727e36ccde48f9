#include "smallcell/load_model.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace smallcell {

namespace {

constexpr double kAreaShape = 3.5;  // cell-area gamma shape constant

// log of the untruncated pmf entry at K for shape constant c:
//   3.5^c * Gamma(K+c) * ratio^K / (Gamma(c) * K! * (3.5+ratio)^(K+c))
double log_pmf_entry(int k, double ratio, double c) {
  return c * std::log(kAreaShape) + std::lgamma(k + c) +
         k * std::log(ratio) - std::lgamma(c) - std::lgamma(k + 1.0) -
         (k + c) * std::log(kAreaShape + ratio);
}

}  // namespace

LoadPmf LoadPmf::degenerate(int k) {
  if (k < 0) throw InvalidParameter("degenerate load: negative count");
  LoadPmf pmf;
  pmf.ratio = static_cast<double>(k);
  pmf.c = std::numeric_limits<double>::quiet_NaN();
  pmf.probs.assign(k + 1, 0.0);
  pmf.probs[k] = 1.0;
  return pmf;
}

LoadPmf LoadPmf::from_weights(std::vector<double> weights) {
  if (weights.empty()) throw InvalidParameter("load pmf: empty weights");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw InvalidParameter("load pmf: weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw InvalidParameter("load pmf: zero total weight");
  for (double& w : weights) w /= total;
  LoadPmf pmf;
  pmf.c = std::numeric_limits<double>::quiet_NaN();
  pmf.probs = std::move(weights);
  pmf.ratio = pmf_moment(pmf, 1);
  return pmf;
}

LoadPmf cell_load_pmf(double ratio, double c, int k_max) {
  if (!(ratio > 0.0) || !std::isfinite(ratio))
    throw InvalidParameter("cell_load_pmf: ratio must be > 0");
  if (!(c > 0.0) || !std::isfinite(c))
    throw InvalidParameter("cell_load_pmf: c must be > 0");
  if (k_max < 1) throw InvalidParameter("cell_load_pmf: k_max must be >= 1");

  std::vector<double> probs(k_max + 1);
  double retained = 0.0;
  for (int k = 0; k <= k_max; ++k) {
    probs[k] = std::exp(log_pmf_entry(k, ratio, c));
    retained += probs[k];
  }
  // The untruncated pmf sums to exactly 1, so the discarded tail is 1-sum.
  const double tail = 1.0 - retained;
  if (!(tail < kMaxTailMass)) {
    throw TailMassTooLarge("cell_load_pmf: tail mass " + std::to_string(tail) +
                           " beyond k_max=" + std::to_string(k_max) +
                           " exceeds 1e-9; increase k_max");
  }
  for (double& p : probs) p /= retained;

  LoadPmf pmf;
  pmf.ratio = ratio;
  pmf.c = c;
  pmf.probs = std::move(probs);
  return pmf;
}

LoadPmf tagged_cell_extra_load_pmf(double ratio, int k_max) {
  return cell_load_pmf(ratio, kAreaShape + 1.0, k_max);
}

double pmf_moment(const LoadPmf& pmf, int order) {
  if (order != 1 && order != 2)
    throw InvalidParameter("pmf_moment: order must be 1 or 2");
  double acc = 0.0;
  for (int k = static_cast<int>(pmf.probs.size()) - 1; k >= 0; --k) {
    const double kk = static_cast<double>(k);
    acc += (order == 1 ? kk : kk * kk) * pmf.probs[k];
  }
  return acc;
}

}  // namespace smallcell
