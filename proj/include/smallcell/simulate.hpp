#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "smallcell/access.hpp"
#include "smallcell/analytic.hpp"
#include "smallcell/rng.hpp"

namespace smallcell {

struct SystemConfig;  // config.hpp

/// Finite observation window: a disk of the given radius (in units of the
/// AP density scale, density normalized to 1) with a central guard region of
/// guard_fraction * radius inside which measurements are taken.
struct SimWindow {
  double radius = 20.0;
  double guard_fraction = 0.5;

  bool operator==(const SimWindow&) const = default;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// One sampled deployment. The probe user is ue_positions[0] at the origin
/// and its serving AP is relabeled to index 0. cell_counts includes the probe
/// user in its serving cell.
struct NetworkRealization {
  std::vector<Point> ap_positions;
  std::vector<Point> ue_positions;
  std::vector<int> association;  // ue index -> ap index (nearest, ties by
                                 // lowest ap index)
  std::vector<int> cell_counts;
  int degenerate_resamples = 0;  // empty-window draws discarded internally
};

/// Samples AP and user point processes over the window, associates every user
/// with its nearest AP and pins the probe user at the origin.
NetworkRealization sample_network(double ratio, const SimWindow& window,
                                  Rng& rng);

struct SchemeOptions {
  SchemeId scheme = SchemeId::Scheme1;
  int n = 1;
  int m_max = 1;
  TimeShare share = TimeShare::ProportionalToGroupSize;
  bool all_active = false;  // saturated baseline: every AP transmits a full
                            // group on every subchannel
};

struct SirSample {
  double sir = 0.0;  // +infinity when no interferer is active on the channel
  int k0 = 0;
  int m = 0;
  int tdma_groups = 1;  // TDMA units sharing the probe's subchannel
  double serving_distance = 0.0;
};

/// Runs the access scheme independently in every cell, reads the SDMA counts
/// off the probe user's subchannel and draws the fading to produce one SIR
/// sample. When probe_ap >= 1, *probe_active reports whether that AP
/// transmits on the probe's subchannel.
SirSample sample_typical_sir(const NetworkRealization& realization,
                             const SchemeOptions& options, double alpha,
                             Rng& rng, int probe_ap = -1,
                             bool* probe_active = nullptr);

/// Achieved-rate functional of a SIR sample: zero below the SIR threshold,
/// otherwise the per-channel rate scaled by the probe's TDMA/SDMA share.
double rate_from_sample(const SirSample& sample, double theta0, int n,
                        TimeShare share = TimeShare::ProportionalToGroupSize);

/// Convenience: one fresh SIR sample mapped through rate_from_sample.
double sample_typical_rate(const NetworkRealization& realization,
                           const SchemeOptions& options,
                           const ChannelParams& params, Rng& rng);

/// Fraction of samples <= x for every grid abscissa; +infinity samples count
/// above every abscissa.
CdfCurve empirical_cdf(std::span<const double> samples,
                       std::span<const double> grid);

struct CampaignDiagnostics {
  long long realizations = 0;
  long long degenerate_resamples = 0;
  long long guard_resamples = 0;
  long long activity_observations = 0;
  long long activity_active = 0;
  double mean_ap_count = 0.0;
};

struct SampleRecord {
  std::uint64_t seed = 0;
  double sir = 0.0;
  int k0 = 0;
  int m = 0;
  double rate = 0.0;
};

struct CampaignResult {
  CdfCurve sir_curve;   // over the theta grid, linear scale
  CdfCurve rate_curve;  // over the rate grid
  double activity_estimate = 0.0;
  CampaignDiagnostics diagnostics;
};

/// Runs n_samples independent realizations with per-realization seeds derived
/// from base_seed. Output is bit-identical for a fixed base_seed regardless
/// of the number of worker threads. Each realization contributes one SIR and
/// one rate sample of the probe user plus one subchannel-activity observation
/// of a uniformly chosen interior AP.
CampaignResult run_campaign(const SystemConfig& config, long long n_samples,
                            std::uint64_t base_seed,
                            std::vector<SampleRecord>* dump = nullptr);

/// Empirical pmf (index 0..k_cap) of ambient per-cell user counts of interior
/// APs, excluding the probe's serving cell. Validates the load model against
/// realized tessellations.
std::vector<double> empirical_cell_count_pmf(double ratio,
                                             const SimWindow& window,
                                             int realizations, int k_cap,
                                             std::uint64_t seed);

}  // namespace smallcell
