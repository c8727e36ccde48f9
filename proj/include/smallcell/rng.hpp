#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "smallcell/errors.hpp"

namespace smallcell {

using Rng = std::mt19937_64;

/// Default base seed used by the CLI when --seed is not given. Never replaced
/// by wall-clock time; all campaigns are reproducible by construction.
inline constexpr std::uint64_t kDefaultBaseSeed = 20240801ULL;

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic seed-splitting rule: every consumer of randomness (campaign
/// realization i, pmf estimation for subchannel count n, ...) gets an
/// independent stream identified by (base, stream, index).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index) {
  std::uint64_t state = base;
  std::uint64_t h = splitmix64_next(state);
  state = h ^ stream;
  h = splitmix64_next(state);
  state = h ^ index;
  return splitmix64_next(state);
}

// Stream tags for derive_seed.
inline constexpr std::uint64_t kStreamRealization = 0x7265616cULL;  // campaign
inline constexpr std::uint64_t kStreamMtildePmf = 0x6d74696cULL;
inline constexpr std::uint64_t kStreamJointPmf = 0x6a6f696eULL;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

/// Inverse-cdf sampler over a finite pmf indexed 0..size-1.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs) {
    if (probs.empty()) throw InvalidParameter("DiscreteSampler: empty pmf");
    cumulative_.reserve(probs.size());
    double acc = 0.0;
    for (double p : probs) {
      if (p < 0.0) throw InvalidParameter("DiscreteSampler: negative mass");
      acc += p;
      cumulative_.push_back(acc);
    }
    if (acc <= 0.0) throw InvalidParameter("DiscreteSampler: zero total mass");
    total_ = acc;
  }

  template <class Generator>
  int operator()(Generator& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, total_)(rng);
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<int>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
  double total_ = 0.0;
};

}  // namespace smallcell
