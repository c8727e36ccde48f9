#include "smallcell/optimize.hpp"

namespace smallcell {

ProfileCache::ProfileCache(SchemeId scheme, double ratio, int k_max, int m_max,
                           PmfMethod::Kind kind, long long samples,
                           std::uint64_t base_seed, TimeShare share,
                           bool all_active)
    : scheme_(scheme),
      ratio_(ratio),
      k_max_(k_max),
      m_max_(m_max),
      kind_(kind),
      samples_(samples),
      base_seed_(base_seed),
      share_(share),
      all_active_(all_active) {}

const AccessProfile& ProfileCache::get(int n) {
  auto it = profiles_.find(n);
  if (it != profiles_.end()) return it->second;
  PmfMethod method{kind_, samples_,
                   derive_seed(base_seed_, 0x70726f66ULL,
                               static_cast<std::uint64_t>(n))};
  AccessProfile profile = build_access_profile(
      scheme_, ratio_, k_max_, n, m_max_, method, share_, all_active_);
  return profiles_.emplace(n, std::move(profile)).first->second;
}

OptimizationResult optimal_subchannels(double r0, int n_max,
                                       ProfileCache& cache,
                                       const ChannelParams& params) {
  if (!(r0 > 0.0))
    throw InvalidParameter("optimal_subchannels: r0 must be > 0");
  if (n_max < 1)
    throw InvalidParameter("optimal_subchannels: n_max must be >= 1");

  OptimizationResult result;
  result.r0 = r0;
  result.evaluated.reserve(n_max);
  double best = 2.0;
  for (int n = 1; n <= n_max; ++n) {
    const AccessProfile& profile = cache.get(n);
    const double outage =
        rate_cdf(r0, profile.typical_joint, n, params, profile.mtilde_pmf);
    result.evaluated.emplace_back(n, outage);
    if (outage < best) {
      best = outage;
      result.n_star = n;
    }
  }
  result.outage = best;
  result.outage_at_n1 = result.evaluated.front().second;
  return result;
}

OptimizationResult optimal_subchannels(double r0, int m_max, SchemeId scheme,
                                       int n_max, double ratio,
                                       const ChannelParams& params, int k_max,
                                       const PmfMethod& method) {
  ProfileCache cache(scheme, ratio, k_max, m_max, method.kind, method.samples,
                     method.seed);
  return optimal_subchannels(r0, n_max, cache, params);
}

std::vector<OptimizationResult> outage_frontier(std::span<const double> r_grid,
                                                int n_max, ProfileCache& cache,
                                                const ChannelParams& params) {
  std::vector<OptimizationResult> frontier;
  frontier.reserve(r_grid.size());
  for (double r0 : r_grid)
    frontier.push_back(optimal_subchannels(r0, n_max, cache, params));
  return frontier;
}

}  // namespace smallcell
