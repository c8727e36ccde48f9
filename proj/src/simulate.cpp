#include "smallcell/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <thread>

#include "smallcell/config.hpp"

namespace smallcell {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

// Campaign-grade windows (radius >= 10) are enforced by SystemConfig; the
// raw sampler accepts any positive radius so small windows remain usable in
// tests.
void validate_window(const SimWindow& window) {
  if (!(window.radius > 0.0) || !std::isfinite(window.radius))
    throw InvalidParameter("SimWindow: radius must be > 0");
  if (!(window.guard_fraction > 0.0 && window.guard_fraction < 1.0))
    throw InvalidParameter("SimWindow: guard_fraction must be in (0,1)");
}

Point sample_disk_point(double radius, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double angle = 2.0 * kPi * unit(rng);
  return {r * std::cos(angle), r * std::sin(angle)};
}

double norm2(const Point& p) { return p.x * p.x + p.y * p.y; }

// Uniform-grid nearest-AP index with deterministic lowest-index tie breaking.
class NearestGrid {
 public:
  NearestGrid(std::span<const Point> points, double radius)
      : origin_(-radius), cell_(1.0) {
    dim_ = std::max(1, static_cast<int>(std::ceil(2.0 * radius / cell_)));
    std::vector<int> counts(dim_ * dim_ + 1, 0);
    for (const auto& p : points) ++counts[bucket_of(p) + 1];
    for (int i = 1; i <= dim_ * dim_; ++i) counts[i] += counts[i - 1];
    offsets_ = counts;
    items_.resize(points.size());
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (int i = 0; i < static_cast<int>(points.size()); ++i)
      items_[cursor[bucket_of(points[i])]++] = i;
    points_ = points;
  }

  int nearest(const Point& query) const {
    const int cx = clamp_cell(coord(query.x));
    const int cy = clamp_cell(coord(query.y));
    int best = -1;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (int ring = 0; ring < 2 * dim_; ++ring) {
      if (best >= 0) {
        const double reach = (ring - 1) * cell_;
        if (reach > 0.0 && reach * reach > best_d2) break;
      }
      scan_ring(cx, cy, ring, query, best, best_d2);
    }
    return best;
  }

 private:
  int coord(double v) const {
    return static_cast<int>(std::floor((v - origin_) / cell_));
  }
  int clamp_cell(int c) const { return std::clamp(c, 0, dim_ - 1); }
  int bucket_of(const Point& p) const {
    return clamp_cell(coord(p.x)) * dim_ + clamp_cell(coord(p.y));
  }

  void visit_bucket(int bx, int by, const Point& query, int& best,
                    double& best_d2) const {
    if (bx < 0 || by < 0 || bx >= dim_ || by >= dim_) return;
    const int b = bx * dim_ + by;
    for (int i = offsets_[b]; i < offsets_[b + 1]; ++i) {
      const int idx = items_[i];
      const double dx = points_[idx].x - query.x;
      const double dy = points_[idx].y - query.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2 || (d2 == best_d2 && idx < best)) {
        best_d2 = d2;
        best = idx;
      }
    }
  }

  void scan_ring(int cx, int cy, int ring, const Point& query, int& best,
                 double& best_d2) const {
    if (ring == 0) {
      visit_bucket(cx, cy, query, best, best_d2);
      return;
    }
    for (int dx = -ring; dx <= ring; ++dx) {
      visit_bucket(cx + dx, cy - ring, query, best, best_d2);
      visit_bucket(cx + dx, cy + ring, query, best, best_d2);
    }
    for (int dy = -ring + 1; dy <= ring - 1; ++dy) {
      visit_bucket(cx - ring, cy + dy, query, best, best_d2);
      visit_bucket(cx + ring, cy + dy, query, best, best_d2);
    }
  }

  double origin_;
  double cell_;
  int dim_;
  std::vector<int> offsets_;
  std::vector<int> items_;
  std::span<const Point> points_;
};

}  // namespace

NetworkRealization sample_network(double ratio, const SimWindow& window,
                                  Rng& rng) {
  if (!(ratio > 0.0)) throw InvalidParameter("sample_network: ratio must be > 0");
  validate_window(window);

  const double area = kPi * window.radius * window.radius;
  NetworkRealization real;

  std::poisson_distribution<int> ap_count_dist(area);
  int ap_count = 0;
  for (;;) {
    ap_count = ap_count_dist(rng);
    if (ap_count > 0) break;
    ++real.degenerate_resamples;
  }
  real.ap_positions.resize(ap_count);
  for (auto& p : real.ap_positions) p = sample_disk_point(window.radius, rng);

  std::poisson_distribution<int> ue_count_dist(area * ratio);
  const int ambient_ues = ue_count_dist(rng);
  real.ue_positions.resize(ambient_ues + 1);
  real.ue_positions[0] = {0.0, 0.0};  // probe user
  for (int i = 1; i <= ambient_ues; ++i)
    real.ue_positions[i] = sample_disk_point(window.radius, rng);

  const NearestGrid grid(real.ap_positions, window.radius);
  real.association.resize(real.ue_positions.size());
  real.cell_counts.assign(ap_count, 0);
  for (std::size_t u = 0; u < real.ue_positions.size(); ++u) {
    const int ap = grid.nearest(real.ue_positions[u]);
    real.association[u] = ap;
    ++real.cell_counts[ap];
  }

  const int serving = real.association[0];
  if (serving != 0) {
    std::swap(real.ap_positions[0], real.ap_positions[serving]);
    std::swap(real.cell_counts[0], real.cell_counts[serving]);
    for (auto& a : real.association) {
      if (a == 0)
        a = serving;
      else if (a == serving)
        a = 0;
    }
  }
  return real;
}

SirSample sample_typical_sir(const NetworkRealization& realization,
                             const SchemeOptions& options, double alpha,
                             Rng& rng, int probe_ap, bool* probe_active) {
  if (realization.ap_positions.empty())
    throw InvalidParameter("sample_typical_sir: realization has no AP");
  if (!(alpha > 2.0))
    throw InvalidParameter("sample_typical_sir: alpha must be > 2");

  static thread_local AllocationScratch scratch;
  static thread_local CellAllocation alloc;

  SirSample out;
  out.serving_distance = std::sqrt(norm2(realization.ap_positions[0]));

  int channel = 1;
  if (options.all_active) {
    out.k0 = options.m_max;
    out.m = options.m_max;
    out.tdma_groups = 1;
  } else {
    const int k_total = realization.cell_counts[0];
    if (options.scheme == SchemeId::Scheme1)
      allocate_scheme1(k_total, options.n, options.m_max, rng, scratch, alloc);
    else
      allocate_scheme2(k_total, options.n, options.m_max, rng, scratch, alloc);
    // The allocator permutes users internally, so entry 0 is exchangeable
    // with any cell member: take it as the probe user.
    const auto& probe = alloc.assignments[0];
    channel = probe.subchannel;
    out.m = probe.sdma_group_size;
    out.k0 = alloc.count_on(channel);
    out.tdma_groups = options.scheme == SchemeId::Scheme2
                          ? tdma_group_count(alloc, channel)
                          : (out.k0 + options.m_max - 1) / options.m_max;
  }

  const double g0 = std::exponential_distribution<double>(1.0)(rng);
  const double signal =
      g0 * std::pow(norm2(realization.ap_positions[0]), -alpha / 2.0) / out.m;

  double interference = 0.0;
  for (std::size_t i = 1; i < realization.ap_positions.size(); ++i) {
    int observed = 0;
    if (options.all_active) {
      observed = options.m_max;
    } else if (realization.cell_counts[i] > 0) {
      if (options.scheme == SchemeId::Scheme1)
        allocate_scheme1(realization.cell_counts[i], options.n, options.m_max,
                         rng, scratch, alloc);
      else
        allocate_scheme2(realization.cell_counts[i], options.n, options.m_max,
                         rng, scratch, alloc);
      observed = observed_sdma_count(alloc, channel, options.share, rng);
    }
    if (probe_active != nullptr && static_cast<int>(i) == probe_ap)
      *probe_active = observed >= 1;
    if (observed == 0) continue;
    const double gain = std::gamma_distribution<double>(
        static_cast<double>(observed), 1.0)(rng);
    interference += gain *
                    std::pow(norm2(realization.ap_positions[i]), -alpha / 2.0) /
                    observed;
  }

  out.sir = interference > 0.0 ? signal / interference
                               : std::numeric_limits<double>::infinity();
  return out;
}

double rate_from_sample(const SirSample& sample, double theta0, int n,
                        TimeShare share) {
  if (!(theta0 > 0.0))
    throw InvalidParameter("rate_from_sample: theta0 must be > 0");
  if (n < 1) throw InvalidParameter("rate_from_sample: n must be >= 1");
  if (sample.sir < theta0) return 0.0;
  const double per_channel = std::log2(1.0 + sample.sir) / n;
  if (share == TimeShare::EqualPerGroup)
    return per_channel / sample.tdma_groups;
  return per_channel * sample.m / sample.k0;
}

double sample_typical_rate(const NetworkRealization& realization,
                           const SchemeOptions& options,
                           const ChannelParams& params, Rng& rng) {
  const SirSample sample =
      sample_typical_sir(realization, options, params.alpha, rng);
  return rate_from_sample(sample, params.theta0, options.n, options.share);
}

CdfCurve empirical_cdf(std::span<const double> samples,
                       std::span<const double> grid) {
  if (samples.empty()) throw EmptySamples("empirical_cdf: no samples");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw InvalidParameter("empirical_cdf: grid must be strictly increasing");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  CdfCurve curve;
  curve.abscissae.assign(grid.begin(), grid.end());
  curve.values.reserve(grid.size());
  const double count = static_cast<double>(sorted.size());
  for (double x : grid) {
    const auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
    curve.values.push_back(static_cast<double>(it - sorted.begin()) / count);
  }
  return curve;
}

namespace {

struct RealizationOutcome {
  std::uint64_t seed = 0;
  double sir = 0.0;
  double rate = 0.0;
  int k0 = 0;
  int m = 0;
  int activity = -1;  // -1: no interior AP to observe
  int degenerate_resamples = 0;
  int guard_resamples = 0;
  int ap_count = 0;
};

RealizationOutcome run_one_realization(const SystemConfig& config,
                                       std::uint64_t seed) {
  RealizationOutcome out;
  out.seed = seed;
  Rng rng = make_rng(seed);
  const double guard_radius =
      config.window.guard_fraction * config.window.radius;

  NetworkRealization real;
  for (;;) {
    real = sample_network(config.ratio, config.window, rng);
    out.degenerate_resamples += real.degenerate_resamples;
    const double serving2 = real.ap_positions[0].x * real.ap_positions[0].x +
                            real.ap_positions[0].y * real.ap_positions[0].y;
    if (serving2 <= guard_radius * guard_radius) break;
    if (++out.guard_resamples > 1000)
      throw Error("run_campaign: guard region repeatedly violated");
  }
  out.ap_count = static_cast<int>(real.ap_positions.size());

  // One activity observation per realization: a uniformly chosen interior
  // AP other than the serving one.
  int interior = 0;
  for (std::size_t i = 1; i < real.ap_positions.size(); ++i)
    if (norm2(real.ap_positions[i]) <= guard_radius * guard_radius) ++interior;
  int probe_ap = -1;
  if (interior > 0) {
    int pick = std::uniform_int_distribution<int>(0, interior - 1)(rng);
    for (std::size_t i = 1; i < real.ap_positions.size(); ++i) {
      if (norm2(real.ap_positions[i]) > guard_radius * guard_radius) continue;
      if (pick-- == 0) {
        probe_ap = static_cast<int>(i);
        break;
      }
    }
  }

  const SchemeOptions options = config.scheme_options();
  bool probe_is_active = false;
  const SirSample sample = sample_typical_sir(
      real, options, config.alpha, rng, probe_ap,
      probe_ap >= 0 ? &probe_is_active : nullptr);
  out.sir = sample.sir;
  out.k0 = sample.k0;
  out.m = sample.m;
  out.rate =
      rate_from_sample(sample, config.theta0_linear(), config.n, options.share);
  if (probe_ap >= 0) out.activity = probe_is_active ? 1 : 0;
  return out;
}

}  // namespace

CampaignResult run_campaign(const SystemConfig& config, long long n_samples,
                            std::uint64_t base_seed,
                            std::vector<SampleRecord>* dump) {
  if (n_samples < 100)
    throw InvalidParameter("run_campaign: n_samples must be >= 100");
  config.validate();

  std::vector<RealizationOutcome> outcomes(n_samples);
  const int jobs = std::max(1, config.jobs);

  auto worker = [&](long long lo, long long hi) {
    for (long long i = lo; i < hi; ++i)
      outcomes[i] = run_one_realization(
          config, derive_seed(base_seed, kStreamRealization,
                              static_cast<std::uint64_t>(i)));
  };

  if (jobs == 1) {
    worker(0, n_samples);
  } else {
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(jobs);
    const long long chunk = (n_samples + jobs - 1) / jobs;
    for (int t = 0; t < jobs; ++t) {
      const long long lo = t * chunk;
      const long long hi = std::min<long long>(n_samples, lo + chunk);
      threads.emplace_back([&, t, lo, hi] {
        try {
          worker(lo, hi);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  CampaignResult result;
  std::vector<double> sirs(n_samples);
  std::vector<double> rates(n_samples);
  double ap_total = 0.0;
  for (long long i = 0; i < n_samples; ++i) {
    const auto& o = outcomes[i];
    sirs[i] = o.sir;
    rates[i] = o.rate;
    ap_total += o.ap_count;
    result.diagnostics.degenerate_resamples += o.degenerate_resamples;
    result.diagnostics.guard_resamples += o.guard_resamples;
    if (o.activity >= 0) {
      ++result.diagnostics.activity_observations;
      result.diagnostics.activity_active += o.activity;
    }
  }
  result.diagnostics.realizations = n_samples;
  result.diagnostics.mean_ap_count = ap_total / static_cast<double>(n_samples);
  result.activity_estimate =
      result.diagnostics.activity_observations > 0
          ? static_cast<double>(result.diagnostics.activity_active) /
                static_cast<double>(result.diagnostics.activity_observations)
          : 0.0;

  result.sir_curve = empirical_cdf(sirs, config.theta_grid_linear());
  result.rate_curve = empirical_cdf(rates, config.rate_grid.build());

  if (dump != nullptr) {
    dump->resize(n_samples);
    for (long long i = 0; i < n_samples; ++i)
      (*dump)[i] = {outcomes[i].seed, outcomes[i].sir, outcomes[i].k0,
                    outcomes[i].m, outcomes[i].rate};
  }
  return result;
}

std::vector<double> empirical_cell_count_pmf(double ratio,
                                             const SimWindow& window,
                                             int realizations, int k_cap,
                                             std::uint64_t seed) {
  if (realizations < 1)
    throw InvalidParameter("empirical_cell_count_pmf: realizations >= 1");
  if (k_cap < 1) throw InvalidParameter("empirical_cell_count_pmf: k_cap >= 1");
  const double guard_radius = window.guard_fraction * window.radius;
  std::vector<long long> hits(k_cap + 1, 0);
  long long cells = 0;
  for (int r = 0; r < realizations; ++r) {
    Rng rng = make_rng(derive_seed(seed, kStreamRealization,
                                   static_cast<std::uint64_t>(r)));
    const NetworkRealization real = sample_network(ratio, window, rng);
    for (std::size_t i = 1; i < real.ap_positions.size(); ++i) {
      const double d2 = real.ap_positions[i].x * real.ap_positions[i].x +
                        real.ap_positions[i].y * real.ap_positions[i].y;
      if (d2 > guard_radius * guard_radius) continue;
      const int k = std::min(real.cell_counts[i], k_cap);
      ++hits[k];
      ++cells;
    }
  }
  std::vector<double> pmf(k_cap + 1, 0.0);
  if (cells == 0) return pmf;
  for (int k = 0; k <= k_cap; ++k)
    pmf[k] = static_cast<double>(hits[k]) / static_cast<double>(cells);
  return pmf;
}

}  // namespace smallcell
