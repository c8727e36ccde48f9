#pragma once

#include <vector>

#include "smallcell/errors.hpp"

namespace smallcell {

/// Truncated pmf of the number of users associated with an access point.
///
/// probs[K] is the probability of K users, K = 0..k_max(). Constructed pmfs
/// are renormalized over the truncation range; construction fails if the
/// discarded tail exceeds kMaxTailMass.
struct LoadPmf {
  double ratio = 0.0;  // user-to-AP density ratio the pmf was built from
  double c = 0.0;      // shape constant (3.5 random cell, 4.5 tagged cell);
                       // NaN for synthetic pmfs used in tests
  std::vector<double> probs;

  int k_max() const { return static_cast<int>(probs.size()) - 1; }

  /// Point mass at K = k.
  static LoadPmf degenerate(int k);
  /// Normalized pmf from raw nonnegative weights (index = K).
  static LoadPmf from_weights(std::vector<double> weights);
};

inline constexpr double kMaxTailMass = 1e-9;

/// Per-cell user-count pmf of a randomly chosen cell, truncated at k_max.
/// Evaluated through log-gamma differences so large ratio / k_max do not
/// overflow.
LoadPmf cell_load_pmf(double ratio, double c, int k_max);

/// Count of users sharing the tagged cell in addition to the probe user
/// (same family as cell_load_pmf but with shape constant 4.5; the cell
/// containing the probe user is stochastically larger than a random cell).
LoadPmf tagged_cell_extra_load_pmf(double ratio, int k_max);

/// Raw moment sum_K K^order * probs[K]; order must be 1 or 2.
double pmf_moment(const LoadPmf& pmf, int order);

}  // namespace smallcell
