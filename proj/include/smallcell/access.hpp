#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smallcell/load_model.hpp"
#include "smallcell/rng.hpp"

namespace smallcell {

/// The two multiple-access schemes. Scheme1 spreads users evenly over the
/// frequency subchannels and applies SDMA per subchannel; Scheme2 first packs
/// users into SDMA groups of m_max and spreads the groups over subchannels.
enum class SchemeId { Scheme1, Scheme2 };

struct UeAssignment {
  int subchannel = 0;       // 1..n
  int sdma_group_size = 0;  // users served together with this one, incl. it
  int group_id = 0;         // TDMA unit on the subchannel (Scheme2 group)
};

struct CellAllocation {
  std::vector<UeAssignment> assignments;  // index = user within the cell
  int n = 0;
  int m_max = 0;

  int count_on(int subchannel) const;
  /// Distinct TDMA groups present on a subchannel as (group_id, size) pairs.
  std::vector<std::pair<int, int>> groups_on(int subchannel) const;
};

/// Reusable scratch buffers so per-cell allocation is O(k) with no heap
/// traffic in simulation inner loops.
struct AllocationScratch {
  std::vector<int> pool;  // persistent permutation of subchannels
  std::vector<int> perm;  // user ordering
  std::vector<int> group_perm;
  std::vector<int> group_channel;
  std::vector<int> counts;   // per-subchannel users, cleared via touched
  std::vector<int> touched;
};

/// Even random spread: users are taken in random order and assigned, in
/// rounds of n, distinct uniformly random subchannels; on each subchannel all
/// users share it via SDMA batches of up to m_max (plus TDMA beyond that).
void allocate_scheme1(int k, int n, int m_max, Rng& rng,
                      AllocationScratch& scratch, CellAllocation& out);
CellAllocation allocate_scheme1(int k, int n, int m_max, Rng& rng);

/// Group-first spread: a random permutation of the users is cut into groups
/// of m_max (last group possibly smaller); the groups are spread over
/// subchannels by the same round procedure, TDMA applying when several groups
/// share a subchannel.
void allocate_scheme2(int k, int n, int m_max, Rng& rng,
                      AllocationScratch& scratch, CellAllocation& out);
CellAllocation allocate_scheme2(int k, int n, int m_max, Rng& rng);

/// How an observation instant picks the transmitting group among TDMA groups
/// sharing a subchannel. Proportional shares reproduce the m/k0 time fraction
/// used by the rate definition; EqualPerGroup is the experimental alternative.
enum class TimeShare { ProportionalToGroupSize, EqualPerGroup };

/// Number of users SDMA-served on `subchannel` at a random observation
/// instant (0 if the subchannel is idle). Draws the active TDMA group when
/// several share the subchannel.
int observed_sdma_count(const CellAllocation& alloc, int subchannel,
                        TimeShare share, Rng& rng);

/// Distinct TDMA units sharing a subchannel (allocation-free hot path).
int tdma_group_count(const CellAllocation& alloc, int subchannel);

/// Closed-form probability that a random cell transmits on a given
/// subchannel: mix of min(K, n)/n (Scheme1) or min(ceil(K/m_max), n)/n
/// (Scheme2) over the load pmf.
double subchannel_activity_probability(SchemeId scheme, const LoadPmf& load,
                                       int n, int m_max);

struct PmfMethod {
  enum class Kind { Auto, Exact, MonteCarlo };
  Kind kind = Kind::Auto;
  long long samples = 1'000'000;
  std::uint64_t seed = kDefaultBaseSeed;

  static PmfMethod exact() { return {Kind::Exact, 0, 0}; }
  static PmfMethod monte_carlo(long long samples, std::uint64_t seed) {
    return {Kind::MonteCarlo, samples, seed};
  }
};

/// Size of the ordered subchannel-assignment space summed over the load
/// support, saturated at 1e18. Exact enumeration is admitted only while this
/// stays within kExactEnumerationLimit.
double assignment_space_size(SchemeId scheme, const LoadPmf& load, int n,
                             int m_max, bool marked_user);
inline constexpr double kExactEnumerationLimit = 1e6;

/// Marginal pmf (index 0..m_max) of the SDMA count observed on a fixed
/// subchannel of a random cell with load K ~ `load`.
std::vector<double> interferer_mtilde_pmf(
    SchemeId scheme, const LoadPmf& load, int n, int m_max,
    const PmfMethod& method,
    TimeShare share = TimeShare::ProportionalToGroupSize);

struct JointProb {
  int k0 = 0;  // users sharing the probe user's subchannel, incl. itself
  int m = 0;   // probe user's SDMA group size
  double prob = 0.0;
};
using JointPmf = std::vector<JointProb>;

/// Joint pmf of (K0, M) for the probe user of the tagged cell: the cell
/// serves 1 + K_extra users with K_extra ~ extra_load, one of them marked.
JointPmf typical_joint_pmf(SchemeId scheme, const LoadPmf& extra_load, int n,
                           int m_max, const PmfMethod& method);

/// Marginal pmf of M (index 0..m_max, entry 0 unused) from a joint pmf.
std::vector<double> marginal_m_pmf(const JointPmf& joint, int m_max);

/// Everything the analytic engine needs about one (scheme, n, m_max, ratio)
/// operating point.
struct AccessProfile {
  std::vector<double> mtilde_pmf;  // 0..m_max
  JointPmf typical_joint;
};

/// Builds mtilde from the random-cell load (shape 3.5) and the joint from the
/// tagged-cell extra load (shape 4.5). all_active forces the saturated
/// baseline: every cell transmits a full group of m_max on every subchannel.
AccessProfile build_access_profile(
    SchemeId scheme, double ratio, int k_max, int n, int m_max,
    const PmfMethod& method,
    TimeShare share = TimeShare::ProportionalToGroupSize,
    bool all_active = false);

}  // namespace smallcell
