#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "smallcell/access.hpp"
#include "smallcell/analytic.hpp"

namespace smallcell {

struct OptimizationResult {
  double r0 = 0.0;
  int n_star = 1;
  double outage = 1.0;
  double outage_at_n1 = 1.0;
  std::vector<std::pair<int, double>> evaluated;  // (n, outage) per candidate
};

/// Memoizes access profiles per subchannel count so frontier sweeps reuse the
/// expensive pmf estimation. Profiles for a given n are seeded independently
/// of the sweep order (seed derived from base_seed and n).
class ProfileCache {
 public:
  ProfileCache(SchemeId scheme, double ratio, int k_max, int m_max,
               PmfMethod::Kind kind, long long samples,
               std::uint64_t base_seed,
               TimeShare share = TimeShare::ProportionalToGroupSize,
               bool all_active = false);

  const AccessProfile& get(int n);
  int m_max() const { return m_max_; }

 private:
  SchemeId scheme_;
  double ratio_;
  int k_max_;
  int m_max_;
  PmfMethod::Kind kind_;
  long long samples_;
  std::uint64_t base_seed_;
  TimeShare share_;
  bool all_active_;
  std::map<int, AccessProfile> profiles_;
};

/// Exhaustive search over n in 1..n_max for the subchannel count minimizing
/// the analytic rate-outage probability at r0; smallest n wins ties.
OptimizationResult optimal_subchannels(double r0, int n_max,
                                       ProfileCache& cache,
                                       const ChannelParams& params);

/// Convenience overload owning a throwaway cache.
OptimizationResult optimal_subchannels(double r0, int m_max, SchemeId scheme,
                                       int n_max, double ratio,
                                       const ChannelParams& params, int k_max,
                                       const PmfMethod& method);

/// Independent per-r0 optimization over a rate grid. The resulting curve is
/// an envelope of minima, not a cdf: the optimizing n changes with r0.
std::vector<OptimizationResult> outage_frontier(std::span<const double> r_grid,
                                                int n_max, ProfileCache& cache,
                                                const ChannelParams& params);

}  // namespace smallcell
