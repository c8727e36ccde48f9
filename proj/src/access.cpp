#include "smallcell/access.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace smallcell {

namespace {

void require_cell_args(int k, int n, int m_max) {
  if (k < 0) throw InvalidParameter("allocation: negative user count");
  if (n < 1) throw InvalidParameter("allocation: n must be >= 1");
  if (m_max < 1) throw InvalidParameter("allocation: m_max must be >= 1");
}

void ensure_pool(AllocationScratch& scratch, int n) {
  if (static_cast<int>(scratch.pool.size()) != n) {
    scratch.pool.resize(n);
    std::iota(scratch.pool.begin(), scratch.pool.end(), 1);
  }
  if (static_cast<int>(scratch.counts.size()) < n + 1)
    scratch.counts.assign(n + 1, 0);
}

void random_permutation(std::vector<int>& perm, int k, Rng& rng) {
  perm.resize(k);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = k - 1; i > 0; --i) {
    const int j = std::uniform_int_distribution<int>(0, i)(rng);
    std::swap(perm[i], perm[j]);
  }
}

// Draws `count` distinct subchannels for one allocation round. The pool stays
// a permutation of 1..n across calls, so no reset is needed between rounds.
template <class Visit>
void draw_round(std::vector<int>& pool, int n, int count, Rng& rng,
                Visit&& visit) {
  for (int j = 0; j < count; ++j) {
    const int pick = j + std::uniform_int_distribution<int>(0, n - 1 - j)(rng);
    std::swap(pool[j], pool[pick]);
    visit(j, pool[j]);
  }
}

void validate_load(const LoadPmf& load, const char* where) {
  if (load.probs.empty())
    throw InvalidParameter(std::string(where) + ": empty load pmf");
  double sum = 0.0;
  for (double p : load.probs) {
    if (p < 0.0) throw InvalidParameter(std::string(where) + ": negative mass");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw InvalidParameter(std::string(where) + ": load pmf does not sum to 1");
}

int groups_of(int k, int m_max) { return (k + m_max - 1) / m_max; }

}  // namespace

int CellAllocation::count_on(int subchannel) const {
  int count = 0;
  for (const auto& a : assignments)
    if (a.subchannel == subchannel) ++count;
  return count;
}

std::vector<std::pair<int, int>> CellAllocation::groups_on(
    int subchannel) const {
  std::vector<std::pair<int, int>> groups;
  for (const auto& a : assignments) {
    if (a.subchannel != subchannel) continue;
    bool seen = false;
    for (auto& g : groups)
      if (g.first == a.group_id) {
        seen = true;
        break;
      }
    if (!seen) groups.emplace_back(a.group_id, a.sdma_group_size);
  }
  return groups;
}

void allocate_scheme1(int k, int n, int m_max, Rng& rng,
                      AllocationScratch& scratch, CellAllocation& out) {
  require_cell_args(k, n, m_max);
  out.n = n;
  out.m_max = m_max;
  out.assignments.resize(k);
  if (k == 0) return;

  ensure_pool(scratch, n);
  random_permutation(scratch.perm, k, rng);
  scratch.touched.clear();

  int pos = 0;
  while (pos < k) {
    const int round = std::min(k - pos, n);
    draw_round(scratch.pool, n, round, rng, [&](int j, int ch) {
      auto& slot = out.assignments[scratch.perm[pos + j]];
      slot.subchannel = ch;
      slot.group_id = ch;  // one SDMA/TDMA unit per subchannel
      if (scratch.counts[ch]++ == 0) scratch.touched.push_back(ch);
    });
    pos += round;
  }
  for (auto& a : out.assignments)
    a.sdma_group_size = std::min(scratch.counts[a.subchannel], m_max);
  for (int ch : scratch.touched) scratch.counts[ch] = 0;
}

CellAllocation allocate_scheme1(int k, int n, int m_max, Rng& rng) {
  AllocationScratch scratch;
  CellAllocation out;
  allocate_scheme1(k, n, m_max, rng, scratch, out);
  return out;
}

void allocate_scheme2(int k, int n, int m_max, Rng& rng,
                      AllocationScratch& scratch, CellAllocation& out) {
  require_cell_args(k, n, m_max);
  out.n = n;
  out.m_max = m_max;
  out.assignments.resize(k);
  if (k == 0) return;

  ensure_pool(scratch, n);
  random_permutation(scratch.perm, k, rng);

  const int full = k / m_max;
  const int remainder = k % m_max;
  const int g = groups_of(k, m_max);

  // Groups are spread over subchannels by the same round procedure as
  // Scheme 1, in a fresh random order so the short group is not always last.
  random_permutation(scratch.group_perm, g, rng);
  scratch.group_channel.resize(g);
  int pos = 0;
  while (pos < g) {
    const int round = std::min(g - pos, n);
    draw_round(scratch.pool, n, round, rng, [&](int j, int ch) {
      scratch.group_channel[scratch.group_perm[pos + j]] = ch;
    });
    pos += round;
  }

  for (int i = 0; i < k; ++i) {
    const int group = i / m_max;
    auto& slot = out.assignments[scratch.perm[i]];
    slot.subchannel = scratch.group_channel[group];
    slot.sdma_group_size = group < full ? m_max : remainder;
    slot.group_id = group + 1;
  }
}

CellAllocation allocate_scheme2(int k, int n, int m_max, Rng& rng) {
  AllocationScratch scratch;
  CellAllocation out;
  allocate_scheme2(k, n, m_max, rng, scratch, out);
  return out;
}

int observed_sdma_count(const CellAllocation& alloc, int subchannel,
                        TimeShare share, Rng& rng) {
  static thread_local std::vector<std::pair<int, int>> groups;
  groups.clear();
  for (const auto& a : alloc.assignments) {
    if (a.subchannel != subchannel) continue;
    bool seen = false;
    for (auto& g : groups)
      if (g.first == a.group_id) {
        seen = true;
        break;
      }
    if (!seen) groups.emplace_back(a.group_id, a.sdma_group_size);
  }
  if (groups.empty()) return 0;
  if (groups.size() == 1) return groups.front().second;

  double total = 0.0;
  for (auto& g : groups)
    total += share == TimeShare::ProportionalToGroupSize ? g.second : 1.0;
  double u = std::uniform_real_distribution<double>(0.0, total)(rng);
  for (auto& g : groups) {
    u -= share == TimeShare::ProportionalToGroupSize ? g.second : 1.0;
    if (u <= 0.0) return g.second;
  }
  return groups.back().second;
}

int tdma_group_count(const CellAllocation& alloc, int subchannel) {
  static thread_local std::vector<int> ids;
  ids.clear();
  for (const auto& a : alloc.assignments) {
    if (a.subchannel != subchannel) continue;
    if (std::find(ids.begin(), ids.end(), a.group_id) == ids.end())
      ids.push_back(a.group_id);
  }
  return static_cast<int>(ids.size());
}

double subchannel_activity_probability(SchemeId scheme, const LoadPmf& load,
                                       int n, int m_max) {
  require_cell_args(0, n, m_max);
  validate_load(load, "subchannel_activity_probability");
  double acc = 0.0;
  for (int k = 1; k <= load.k_max(); ++k) {
    const double p = load.probs[k];
    if (p == 0.0) continue;
    const int units = scheme == SchemeId::Scheme1 ? k : groups_of(k, m_max);
    acc += p * (static_cast<double>(std::min(units, n)) / n);
  }
  return acc;
}

namespace {

// Saturating product of per-round ordered channel choices n*(n-1)*...
double round_choice_space(int units, int n) {
  double space = 1.0;
  int pos = 0;
  while (pos < units) {
    const int round = std::min(units - pos, n);
    for (int j = 0; j < round; ++j) {
      space *= static_cast<double>(n - j);
      if (space > 1e18) return 1e18;
    }
    pos += round;
  }
  return space;
}

}  // namespace

double assignment_space_size(SchemeId scheme, const LoadPmf& load, int n,
                             int m_max, bool marked_user) {
  // Orderings that cannot change the outcome are collapsed: only channel
  // draws, the short group's slot (Scheme 2) and the marked user's slot
  // count as distinguishable configurations.
  double total = 0.0;
  for (int k = 0; k <= load.k_max(); ++k) {
    if (load.probs[k] == 0.0) continue;
    const int kt = marked_user ? k + 1 : k;
    if (kt == 0) {
      total += 1.0;
      continue;
    }
    const int units = scheme == SchemeId::Scheme1 ? kt : groups_of(kt, m_max);
    double space = round_choice_space(units, n);
    if (scheme == SchemeId::Scheme2) space *= units;
    if (marked_user) space *= kt;
    total += space;
    if (total > 1e18) return 1e18;
  }
  return total;
}

namespace {

struct Scheme2CellShape {
  int full = 0;       // groups of size m_max
  int remainder = 0;  // size of the short group, 0 if none
  int groups = 0;
  int rounds_full = 0;  // complete allocation rounds (q)
  int tail = 0;         // groups in the final partial round (t)
};

Scheme2CellShape scheme2_shape(int k, int n, int m_max) {
  Scheme2CellShape s;
  s.full = k / m_max;
  s.remainder = k % m_max;
  s.groups = groups_of(k, m_max);
  s.rounds_full = s.groups / n;
  s.tail = s.groups % n;
  return s;
}

// --- exact interferer pmf ---------------------------------------------------

std::vector<double> exact_mtilde_scheme1(const LoadPmf& load, int n,
                                         int m_max) {
  std::vector<double> mt(m_max + 1, 0.0);
  for (int k = 0; k <= load.k_max(); ++k) {
    const double p = load.probs[k];
    if (p == 0.0) continue;
    if (k == 0) {
      mt[0] += p;
      continue;
    }
    // Every full allocation round puts exactly one user on the observed
    // subchannel; the partial round adds one more with probability s/n.
    const int q = k / n;
    const int s = k % n;
    const double p_extra = static_cast<double>(s) / n;
    const int hi = std::min(q + 1, m_max);
    mt[hi] += p * p_extra;
    if (q >= 1)
      mt[std::min(q, m_max)] += p * (1.0 - p_extra);
    else
      mt[0] += p * (1.0 - p_extra);
  }
  return mt;
}

std::vector<double> exact_mtilde_scheme2(const LoadPmf& load, int n, int m_max,
                                         TimeShare share) {
  std::vector<double> mt(m_max + 1, 0.0);
  for (int k = 0; k <= load.k_max(); ++k) {
    const double pk = load.probs[k];
    if (pk == 0.0) continue;
    if (k == 0) {
      mt[0] += pk;
      continue;
    }
    const auto shape = scheme2_shape(k, n, m_max);
    const int q = shape.rounds_full;
    const int t = shape.tail;

    // j_full groups of size m_max and short in {0,1} short groups share the
    // observed subchannel; the transmitting group at the instant is drawn by
    // the TDMA time-share rule.
    auto deposit = [&](int j_full, int has_short, double w) {
      if (w <= 0.0) return;
      if (j_full + has_short == 0) {
        mt[0] += pk * w;
        return;
      }
      double w_short = 0.0;
      if (has_short) {
        const double total =
            share == TimeShare::ProportionalToGroupSize
                ? j_full * static_cast<double>(m_max) + shape.remainder
                : static_cast<double>(j_full) + 1.0;
        w_short = (share == TimeShare::ProportionalToGroupSize
                       ? shape.remainder
                       : 1.0) /
                  total;
        mt[shape.remainder] += pk * w * w_short;
      }
      if (j_full > 0) mt[m_max] += pk * w * (1.0 - w_short);
    };

    const double p_tail_hit = static_cast<double>(t) / n;
    if (shape.remainder == 0) {
      deposit(q + 1, 0, p_tail_hit);
      deposit(q, 0, 1.0 - p_tail_hit);
    } else {
      const double inv_n = 1.0 / n;
      // Position of the short group in the random group order.
      const double p_short_in_full =
          static_cast<double>(q) * n / shape.groups;
      const double p_short_in_tail = static_cast<double>(t) / shape.groups;
      if (q > 0) {
        for (int hit = 0; hit <= 1; ++hit) {
          const double ph = hit ? p_tail_hit : 1.0 - p_tail_hit;
          deposit(q - 1 + hit, 1, p_short_in_full * inv_n * ph);
          deposit(q + hit, 0, p_short_in_full * (1.0 - inv_n) * ph);
        }
      }
      if (t > 0) {
        deposit(q, 1, p_short_in_tail * inv_n);
        deposit(q + 1, 0, p_short_in_tail * (t - 1) * inv_n);
        deposit(q, 0, p_short_in_tail * (1.0 - p_tail_hit));
      }
    }
  }
  return mt;
}

// --- exact typical joint pmf ------------------------------------------------

using JointAcc = std::map<std::pair<int, int>, double>;

void exact_joint_scheme1(const LoadPmf& extra_load, int n, int m_max,
                         JointAcc& acc) {
  for (int ke = 0; ke <= extra_load.k_max(); ++ke) {
    const double p = extra_load.probs[ke];
    if (p == 0.0) continue;
    const int kt = ke + 1;
    const int q = kt / n;
    const int s = kt % n;
    // The probe user's subchannel carries q+1 users iff the probe sits in the
    // partial round or the partial round hits its subchannel.
    const double p_hi = static_cast<double>(s) * (q + 1) / kt;
    if (p_hi > 0.0)
      acc[{q + 1, std::min(q + 1, m_max)}] += p * p_hi;
    if (q >= 1 && p_hi < 1.0)
      acc[{q, std::min(q, m_max)}] += p * (1.0 - p_hi);
  }
}

void exact_joint_scheme2(const LoadPmf& extra_load, int n, int m_max,
                         JointAcc& acc) {
  for (int ke = 0; ke <= extra_load.k_max(); ++ke) {
    const double pk = extra_load.probs[ke];
    if (pk == 0.0) continue;
    const int kt = ke + 1;
    const auto shape = scheme2_shape(kt, n, m_max);
    const int q = shape.rounds_full;
    const int t = shape.tail;
    const int g = shape.groups;
    const double inv_n = 1.0 / n;
    const double p_tail_hit = static_cast<double>(t) / n;

    // deposit: probe group size m; o_full / o_short other groups co-scheduled
    // on the probe's subchannel.
    auto deposit = [&](int m, int o_full, int o_short, double w) {
      if (w <= 0.0) return;
      const int k0 = m + o_full * m_max + o_short * shape.remainder;
      acc[{k0, m}] += pk * w;
    };

    const double p_probe_full =
        static_cast<double>(shape.full) * m_max / kt;  // probe in a full group

    // Probe's group sits in a full allocation round / the partial round.
    const double pos_full = static_cast<double>(q) * n / g;
    const double pos_tail = static_cast<double>(t) / g;

    if (shape.remainder == 0) {
      // All groups have size m_max.
      const int m = m_max;
      deposit(m, q - 1 + 1, 0, pos_full * p_tail_hit);
      deposit(m, q - 1, 0, pos_full * (1.0 - p_tail_hit));
      deposit(m, q, 0, pos_tail);
      continue;
    }

    // Case probe in the short group: every other group has size m_max.
    {
      const double w0 = 1.0 - p_probe_full;
      const int m = shape.remainder;
      deposit(m, q - 1 + 1, 0, w0 * pos_full * p_tail_hit);
      deposit(m, q - 1, 0, w0 * pos_full * (1.0 - p_tail_hit));
      deposit(m, q, 0, w0 * pos_tail);
    }

    // Case probe in a full group; the short group sits elsewhere.
    if (shape.full > 0) {
      const double w0 = p_probe_full;
      const int m = m_max;
      const double rem_slots = g - 1;  // slots available to the short group
      if (pos_full > 0.0) {
        const double same_round = (n - 1) / rem_slots;
        const double other_full = static_cast<double>(q - 1) * n / rem_slots;
        const double in_tail = static_cast<double>(t) / rem_slots;
        // Short group in the probe's round: never on the probe's subchannel.
        for (int hit = 0; hit <= 1; ++hit) {
          const double ph = hit ? p_tail_hit : 1.0 - p_tail_hit;
          deposit(m, q - 1 + hit, 0, w0 * pos_full * same_round * ph);
        }
        // Short group in another full round: lands on the probe's subchannel
        // with probability 1/n, otherwise that round contributes a full group.
        for (int hit = 0; hit <= 1; ++hit) {
          const double ph = hit ? p_tail_hit : 1.0 - p_tail_hit;
          deposit(m, q - 2 + hit, 1,
                  w0 * pos_full * other_full * inv_n * ph);
          deposit(m, q - 1 + hit, 0,
                  w0 * pos_full * other_full * (1.0 - inv_n) * ph);
        }
        // Short group in the partial round.
        deposit(m, q - 1, 1, w0 * pos_full * in_tail * inv_n);
        deposit(m, q - 1 + 1, 0, w0 * pos_full * in_tail * (t - 1) * inv_n);
        deposit(m, q - 1, 0, w0 * pos_full * in_tail * (1.0 - p_tail_hit));
      }
      if (pos_tail > 0.0) {
        const double also_tail = static_cast<double>(t - 1) / rem_slots;
        const double in_full = static_cast<double>(q) * n / rem_slots;
        deposit(m, q, 0, w0 * pos_tail * also_tail);
        deposit(m, q - 1, 1, w0 * pos_tail * in_full * inv_n);
        deposit(m, q - 1 + 1, 0, w0 * pos_tail * in_full * (1.0 - inv_n));
      }
    }
  }
}

JointPmf joint_from_acc(const JointAcc& acc) {
  JointPmf joint;
  joint.reserve(acc.size());
  for (const auto& [key, prob] : acc) {
    if (prob <= 0.0) continue;
    joint.push_back({key.first, key.second, prob});
  }
  return joint;
}

// --- Monte Carlo estimators ---------------------------------------------------

std::vector<double> mc_mtilde(SchemeId scheme, const LoadPmf& load, int n,
                              int m_max, long long samples, std::uint64_t seed,
                              TimeShare share) {
  if (samples < 1)
    throw InvalidParameter("interferer_mtilde_pmf: samples must be >= 1");
  Rng rng = make_rng(derive_seed(seed, kStreamMtildePmf, 0));
  DiscreteSampler draw_k(load.probs);
  AllocationScratch scratch;
  CellAllocation alloc;
  std::vector<long long> hits(m_max + 1, 0);
  for (long long i = 0; i < samples; ++i) {
    const int k = draw_k(rng);
    if (k == 0) {
      ++hits[0];
      continue;
    }
    if (scheme == SchemeId::Scheme1)
      allocate_scheme1(k, n, m_max, rng, scratch, alloc);
    else
      allocate_scheme2(k, n, m_max, rng, scratch, alloc);
    ++hits[observed_sdma_count(alloc, 1, share, rng)];
  }
  std::vector<double> pmf(m_max + 1);
  for (int i = 0; i <= m_max; ++i)
    pmf[i] = static_cast<double>(hits[i]) / static_cast<double>(samples);
  return pmf;
}

JointPmf mc_joint(SchemeId scheme, const LoadPmf& extra_load, int n, int m_max,
                  long long samples, std::uint64_t seed) {
  if (samples < 1)
    throw InvalidParameter("typical_joint_pmf: samples must be >= 1");
  Rng rng = make_rng(derive_seed(seed, kStreamJointPmf, 0));
  DiscreteSampler draw_k(extra_load.probs);
  AllocationScratch scratch;
  CellAllocation alloc;
  std::map<std::pair<int, int>, long long> hits;
  for (long long i = 0; i < samples; ++i) {
    const int kt = 1 + draw_k(rng);
    if (scheme == SchemeId::Scheme1)
      allocate_scheme1(kt, n, m_max, rng, scratch, alloc);
    else
      allocate_scheme2(kt, n, m_max, rng, scratch, alloc);
    // The allocators permute users internally, so user 0 is a uniformly
    // random member of the cell: take it as the probe user.
    const auto& probe = alloc.assignments[0];
    ++hits[{alloc.count_on(probe.subchannel), probe.sdma_group_size}];
  }
  JointPmf joint;
  joint.reserve(hits.size());
  for (const auto& [key, count] : hits)
    joint.push_back({key.first, key.second,
                     static_cast<double>(count) / static_cast<double>(samples)});
  return joint;
}

bool exact_is_feasible(SchemeId scheme, const LoadPmf& load, int n, int m_max,
                       bool marked_user) {
  return assignment_space_size(scheme, load, n, m_max, marked_user) <=
         kExactEnumerationLimit;
}

}  // namespace

std::vector<double> interferer_mtilde_pmf(SchemeId scheme, const LoadPmf& load,
                                          int n, int m_max,
                                          const PmfMethod& method,
                                          TimeShare share) {
  require_cell_args(0, n, m_max);
  validate_load(load, "interferer_mtilde_pmf");
  bool exact = false;
  switch (method.kind) {
    case PmfMethod::Kind::Exact:
      if (!exact_is_feasible(scheme, load, n, m_max, false))
        throw EnumerationTooLarge(
            "interferer_mtilde_pmf: assignment space exceeds exact limit");
      exact = true;
      break;
    case PmfMethod::Kind::Auto:
      exact = exact_is_feasible(scheme, load, n, m_max, false);
      break;
    case PmfMethod::Kind::MonteCarlo:
      break;
  }
  if (exact)
    return scheme == SchemeId::Scheme1
               ? exact_mtilde_scheme1(load, n, m_max)
               : exact_mtilde_scheme2(load, n, m_max, share);
  return mc_mtilde(scheme, load, n, m_max, method.samples, method.seed, share);
}

JointPmf typical_joint_pmf(SchemeId scheme, const LoadPmf& extra_load, int n,
                           int m_max, const PmfMethod& method) {
  require_cell_args(0, n, m_max);
  validate_load(extra_load, "typical_joint_pmf");
  bool exact = false;
  switch (method.kind) {
    case PmfMethod::Kind::Exact:
      if (!exact_is_feasible(scheme, extra_load, n, m_max, true))
        throw EnumerationTooLarge(
            "typical_joint_pmf: assignment space exceeds exact limit");
      exact = true;
      break;
    case PmfMethod::Kind::Auto:
      exact = exact_is_feasible(scheme, extra_load, n, m_max, true);
      break;
    case PmfMethod::Kind::MonteCarlo:
      break;
  }
  if (exact) {
    JointAcc acc;
    if (scheme == SchemeId::Scheme1)
      exact_joint_scheme1(extra_load, n, m_max, acc);
    else
      exact_joint_scheme2(extra_load, n, m_max, acc);
    return joint_from_acc(acc);
  }
  return mc_joint(scheme, extra_load, n, m_max, method.samples, method.seed);
}

std::vector<double> marginal_m_pmf(const JointPmf& joint, int m_max) {
  std::vector<double> pmf(m_max + 1, 0.0);
  for (const auto& e : joint) {
    if (e.m < 1 || e.m > m_max)
      throw InvalidParameter("marginal_m_pmf: group size out of range");
    pmf[e.m] += e.prob;
  }
  return pmf;
}

AccessProfile build_access_profile(SchemeId scheme, double ratio, int k_max,
                                   int n, int m_max, const PmfMethod& method,
                                   TimeShare share, bool all_active) {
  AccessProfile profile;
  if (all_active) {
    profile.mtilde_pmf.assign(m_max + 1, 0.0);
    profile.mtilde_pmf[m_max] = 1.0;
    profile.typical_joint = {{m_max, m_max, 1.0}};
    return profile;
  }
  const LoadPmf load = cell_load_pmf(ratio, 3.5, k_max);
  const LoadPmf extra = tagged_cell_extra_load_pmf(ratio, k_max);
  profile.mtilde_pmf =
      interferer_mtilde_pmf(scheme, load, n, m_max, method, share);
  profile.typical_joint = typical_joint_pmf(scheme, extra, n, m_max, method);
  return profile;
}

}  // namespace smallcell
