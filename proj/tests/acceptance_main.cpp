// Acceptance suite: end-to-end checks of the analytic engine, the scheme
// pmfs, the Monte Carlo path and the subchannel optimizer. Prints one
// PASS/FAIL line per criterion; exit code is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "smallcell/access.hpp"
#include "smallcell/analytic.hpp"
#include "smallcell/config.hpp"
#include "smallcell/load_model.hpp"
#include "smallcell/optimize.hpp"
#include "smallcell/simulate.hpp"
#include "smallcell/stats.hpp"

using namespace smallcell;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

struct CheckContext {
  bool pass = true;
  std::ostringstream detail;

  void require(bool condition, const std::string& label) {
    if (!condition) {
      pass = false;
      detail << " [FAILED: " << label << "]";
    }
  }
};

SystemConfig fig2_config(SchemeId scheme, int n, int m_max,
                         std::uint64_t seed, double ratio = 10.0) {
  SystemConfig c;
  c.scheme = scheme;
  c.n = n;
  c.m_max = m_max;
  c.ratio = ratio;
  c.alpha = 4.0;
  c.theta0_db = 0.0;
  c.k_max = 256;
  c.pmf_method = PmfMethod::Kind::MonteCarlo;
  c.pmf_samples = 1'000'000;
  c.base_seed = seed;
  c.rate_grid = {0.005, 0.5, 100, GridSpec::Scale::Linear};
  return c;
}

// ---- criterion 1: saturated single-antenna baseline --------------------------

bool criterion1(std::string& detail) {
  CheckContext ctx;
  const double expected = 1.0 - 1.0 / (1.0 + kPi / 4.0);

  auto t0 = std::chrono::steady_clock::now();
  const AccessProfile profile = build_access_profile(
      SchemeId::Scheme1, 0.1, 64, 1, 1, PmfMethod::exact(),
      TimeShare::ProportionalToGroupSize, true);
  const double analytic =
      sir_cdf(1.0, marginal_m_pmf(profile.typical_joint, 1),
              profile.mtilde_pmf, 4.0);
  const double analytic_seconds = seconds_since(t0);
  const double analytic_err = std::abs(analytic - expected);
  ctx.require(analytic_err < 1e-6, "analytic error vs closed form < 1e-6");
  ctx.require(analytic_seconds < 1.0, "analytic runtime < 1 s");

  t0 = std::chrono::steady_clock::now();
  SystemConfig c;
  c.all_active = true;
  c.n = 1;
  c.m_max = 1;
  c.ratio = 0.1;
  c.alpha = 4.0;
  c.theta0_db = 0.0;
  c.theta_grid = {0.0, 1.0, 2, GridSpec::Scale::Linear};
  c.rate_grid = {0.01, 1.0, 4, GridSpec::Scale::Linear};
  const CampaignResult campaign = run_campaign(c, 10000, 910137);
  const double mc_seconds = seconds_since(t0);
  const double empirical = campaign.sir_curve.values[0];  // 0 dB point
  const double mc_err = std::abs(empirical - expected);
  ctx.require(mc_err < 0.01, "MC estimate within 0.01 at 1e4 samples");
  ctx.require(mc_seconds < 120.0, "MC runtime < 2 min");

  ctx.detail << "analytic err " << analytic_err << " (" << analytic_seconds
             << " s), MC err " << mc_err << " (" << mc_seconds << " s)";
  detail = ctx.detail.str();
  return ctx.pass;
}

// ---- criterion 2: analytic vs simulated rate cdf -----------------------------

bool criterion2(std::string& detail) {
  CheckContext ctx;
  const struct {
    SchemeId scheme;
    int n;
    int m_max;
    std::uint64_t seed;
  } cases[] = {{SchemeId::Scheme1, 5, 1, 221101},
               {SchemeId::Scheme1, 50, 1, 221102},
               {SchemeId::Scheme2, 50, 5, 221103}};
  for (const auto& cs : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const SystemConfig c = fig2_config(cs.scheme, cs.n, cs.m_max, cs.seed);
    const AccessProfile profile = access_profile_for(c);
    const std::vector<double> rates = c.rate_grid.build();
    const CdfCurve analytic =
        rate_cdf_curve(rates, profile, c.n, c.channel_params());
    const CampaignResult campaign = run_campaign(c, 10000, c.base_seed);
    const double sup =
        sup_abs_difference(analytic.values, campaign.rate_curve.values);
    ctx.require(sup <= 0.02, "sup distance <= 0.02 for (m_max,n)=(" +
                                 std::to_string(cs.m_max) + "," +
                                 std::to_string(cs.n) + ")");
    ctx.detail << "(" << cs.m_max << "," << cs.n << ") sup " << sup << " ("
               << seconds_since(t0) << " s) ";
  }
  detail = ctx.detail.str();
  return ctx.pass;
}

// ---- criterion 3: qualitative curve orderings --------------------------------

bool criterion3(std::string& detail) {
  CheckContext ctx;
  const SystemConfig cfg_n5_m1 = fig2_config(SchemeId::Scheme1, 5, 1, 331101);
  const SystemConfig cfg_n50_m1 =
      fig2_config(SchemeId::Scheme1, 50, 1, 331102);
  const SystemConfig cfg_s2_m5 = fig2_config(SchemeId::Scheme2, 50, 5, 331103);
  const SystemConfig cfg_s1_m5 = fig2_config(SchemeId::Scheme1, 50, 5, 331104);

  const std::vector<double> rates = cfg_n5_m1.rate_grid.build();
  const ChannelParams params = cfg_n5_m1.channel_params();
  const auto curve_of = [&](const SystemConfig& c) {
    return rate_cdf_curve(rates, access_profile_for(c), c.n, params);
  };
  const CdfCurve f_n5 = curve_of(cfg_n5_m1);
  const CdfCurve f_n50 = curve_of(cfg_n50_m1);
  const CdfCurve f_s2m5 = curve_of(cfg_s2_m5);
  const CdfCurve f_s1m5 = curve_of(cfg_s1_m5);

  // (a) few subchannels: higher outage floor, but the curves cross below 0.5
  ctx.require(f_n5.values.front() > f_n50.values.front(),
              "rate outage floor higher for n=5 than n=50");
  bool crossed = false;
  for (std::size_t i = 0; i + 1 < rates.size(); ++i) {
    if ((f_n5.values[i] - f_n50.values[i]) *
            (f_n5.values[i + 1] - f_n50.values[i + 1]) <
        0.0)
      crossed = true;
  }
  ctx.require(crossed, "n=5 and n=50 curves cross inside (0, 0.5)");
  ctx.detail << "floor n5 " << f_n5.values.front() << " vs n50 "
             << f_n50.values.front() << "; ";

  // (b) grouped SDMA with many subchannels helps across the whole grid
  double worst_gap = -1.0;
  for (std::size_t i = 0; i < rates.size(); ++i)
    worst_gap = std::max(worst_gap, f_s2m5.values[i] - f_n50.values[i]);
  ctx.require(worst_gap <= 0.0,
              "scheme2 m_max=5 n=50 below m_max=1 n=50 pointwise");
  ctx.detail << "scheme2 worst gap " << worst_gap << "; ";

  // (c) per-subchannel SDMA is inert at n=50
  const double sup = sup_abs_difference(f_s1m5.values, f_n50.values);
  ctx.require(sup <= 0.005, "scheme1 m_max=5 within 0.005 of m_max=1 at n=50");
  ctx.detail << "scheme1 m5 sup " << sup;

  detail = ctx.detail.str();
  return ctx.pass;
}

// ---- criterion 4: per-subchannel occupancy closed forms ----------------------

bool criterion4(std::string& detail) {
  CheckContext ctx;
  const long long trials = 100000;
  double worst_z = 0.0;
  AllocationScratch scratch;
  CellAllocation alloc;

  const auto run_cell = [&](SchemeId scheme, int k, int n, int m_max,
                            double expected) {
    Rng rng = make_rng(derive_seed(440011, static_cast<std::uint64_t>(m_max),
                                   static_cast<std::uint64_t>(k * 100 + n) +
                                       (scheme == SchemeId::Scheme2 ? 50 : 0)));
    long long occupied = 0;
    for (long long t = 0; t < trials; ++t) {
      if (scheme == SchemeId::Scheme1)
        allocate_scheme1(k, n, m_max, rng, scratch, alloc);
      else
        allocate_scheme2(k, n, m_max, rng, scratch, alloc);
      occupied += alloc.count_on(1) > 0;
    }
    const double p_hat =
        static_cast<double>(occupied) / static_cast<double>(trials);
    const double se =
        std::sqrt(expected * (1.0 - expected) / static_cast<double>(trials));
    if (se == 0.0) {
      ctx.require(p_hat == expected, "deterministic occupancy cell");
    } else {
      const double z = std::abs(p_hat - expected) / se;
      worst_z = std::max(worst_z, z);
      ctx.require(z <= 3.0, "occupancy within 3 SE (scheme" +
                                std::string(scheme == SchemeId::Scheme1
                                                ? "1"
                                                : "2") +
                                " k=" + std::to_string(k) +
                                " n=" + std::to_string(n) +
                                " m=" + std::to_string(m_max) + ")");
    }
  };

  for (int k = 1; k <= 6; ++k)
    for (int n = 1; n <= 6; ++n) {
      run_cell(SchemeId::Scheme1, k, n, 1,
               static_cast<double>(std::min(k, n)) / n);
      for (int m_max : {2, 3}) {
        const int groups = (k + m_max - 1) / m_max;
        run_cell(SchemeId::Scheme2, k, n, m_max,
                 static_cast<double>(std::min(groups, n)) / n);
      }
    }
  ctx.detail << "worst |z| " << worst_z << " over 108 cells at 1e5 trials";
  detail = ctx.detail.str();
  return ctx.pass;
}

// ---- criterion 5: optimal subchannel selection -------------------------------

bool criterion5(std::string& detail) {
  CheckContext ctx;
  const auto t0 = std::chrono::steady_clock::now();
  const ChannelParams params{4.0, 1.0};
  const int n_max = 200;
  const long long pmf_samples = 400000;

  ProfileCache s1_m5(SchemeId::Scheme1, 10.0, 256, 5,
                     PmfMethod::Kind::MonteCarlo, pmf_samples, 551001);
  ProfileCache s2_m5(SchemeId::Scheme2, 10.0, 256, 5,
                     PmfMethod::Kind::MonteCarlo, pmf_samples, 551002);
  ProfileCache s1_m1(SchemeId::Scheme1, 10.0, 256, 1,
                     PmfMethod::Kind::MonteCarlo, pmf_samples, 551003);
  ProfileCache dense_m1(SchemeId::Scheme1, 2.0, 256, 1,
                        PmfMethod::Kind::MonteCarlo, pmf_samples, 551004);

  std::vector<double> grid;
  for (int i = 1; i <= 16; ++i) grid.push_back(0.1 * i);

  const auto front_s1m5 = outage_frontier(grid, n_max, s1_m5, params);
  const auto front_s2m5 = outage_frontier(grid, n_max, s2_m5, params);
  const auto front_s1m1 = outage_frontier(grid, n_max, s1_m1, params);
  const auto front_dense = outage_frontier(grid, n_max, dense_m1, params);

  double worst_scheme_gap = -1.0;
  double worst_density_gap = -1.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (const auto* front :
         {&front_s1m5, &front_s2m5, &front_s1m1, &front_dense}) {
      ctx.require((*front)[i].outage <= (*front)[i].outage_at_n1 + 1e-12,
                  "frontier below the fixed n=1 curve");
    }
    worst_scheme_gap = std::max(
        worst_scheme_gap, front_s2m5[i].outage - front_s1m5[i].outage);
    worst_density_gap = std::max(
        worst_density_gap, front_dense[i].outage - front_s1m1[i].outage);
  }
  ctx.require(worst_scheme_gap <= 0.0,
              "scheme2 frontier below scheme1 frontier at m_max=5");
  ctx.require(worst_density_gap <= 0.0,
              "denser deployment frontier below the sparse one at m_max=1");

  for (double r0 : {1.7, 1.8, 2.0}) {
    const OptimizationResult res =
        optimal_subchannels(r0, n_max, s1_m5, params);
    ctx.require(res.n_star == 1, "n* = 1 at r0 = " + std::to_string(r0) +
                                     " (got " + std::to_string(res.n_star) +
                                     ")");
  }

  ctx.detail << "scheme gap " << worst_scheme_gap << ", density gap "
             << worst_density_gap << " (" << seconds_since(t0) << " s)";
  detail = ctx.detail.str();
  return ctx.pass;
}

// ---- criterion 6: property suite ---------------------------------------------

bool criterion6(std::string& detail) {
  CheckContext ctx;

  // cdf monotonicity and bounds on evaluation grids
  {
    for (const SystemConfig& c :
         {fig2_config(SchemeId::Scheme1, 5, 1, 661101),
          fig2_config(SchemeId::Scheme2, 50, 5, 661102)}) {
      const AccessProfile profile = access_profile_for(c);
      const CdfCurve sir = sir_cdf_curve(c.theta_grid_linear(), profile,
                                         c.channel_params());
      const CdfCurve rate = rate_cdf_curve(c.rate_grid.build(), profile, c.n,
                                           c.channel_params());
      ctx.require(is_valid_cdf_curve(sir), "SIR cdf monotone within bounds");
      ctx.require(is_valid_cdf_curve(rate), "rate cdf monotone within bounds");
    }
  }

  // breakpoint continuity of the conditional rate cdf
  {
    const ChannelParams params{4.0, 1.0};
    const std::vector<double> mtilde{0.1, 0.5, 0.3, 0.1};
    for (auto [k0, m, n] : {std::tuple{1, 1, 1}, std::tuple{3, 2, 4},
                            std::tuple{7, 3, 5}}) {
      const double breakpoint = std::log2(1.0 + params.theta0) * m / (n * k0);
      const double lower =
          rate_cdf_conditional(breakpoint, k0, m, n, params, mtilde);
      const double upper =
          sir_cdf_conditional(std::exp2(breakpoint * n * k0 / m) - 1.0, m,
                              mtilde, params.alpha);
      ctx.require(std::abs(lower - upper) <= 1e-12,
                  "conditional rate cdf continuous at its breakpoint");
    }
  }

  // scale invariance of SIR samples
  {
    const SchemeOptions options{SchemeId::Scheme1, 4, 2};
    bool ok = true;
    for (std::uint64_t seed = 0; seed < 50 && ok; ++seed) {
      Rng rng = make_rng(derive_seed(663301, 1, seed));
      NetworkRealization real = sample_network(8.0, {10.0, 0.5}, rng);
      Rng draw_a = make_rng(derive_seed(663301, 2, seed));
      const SirSample a = sample_typical_sir(real, options, 4.0, draw_a);
      for (auto& p : real.ap_positions) {
        p.x *= 2.5;
        p.y *= 2.5;
      }
      for (auto& p : real.ue_positions) {
        p.x *= 2.5;
        p.y *= 2.5;
      }
      Rng draw_b = make_rng(derive_seed(663301, 2, seed));
      const SirSample b = sample_typical_sir(real, options, 4.0, draw_b);
      if (std::isinf(a.sir) || std::isinf(b.sir))
        ok = ok && std::isinf(a.sir) && std::isinf(b.sir);
      else
        ok = ok && std::abs(a.sir - b.sir) <= 1e-9 * std::abs(a.sir);
      ok = ok && a.k0 == b.k0 && a.m == b.m;
    }
    ctx.require(ok, "SIR samples scale invariant");
  }

  // realized cell loads against the load model
  {
    const LoadPmf model = cell_load_pmf(10.0, 3.5, 200);
    const auto empirical =
        empirical_cell_count_pmf(10.0, {10.0, 0.5}, 10000, 200, 664401);
    const double tv = total_variation(empirical, model.probs);
    ctx.require(tv <= 0.02, "cell-load sampler total variation <= 0.02");
    ctx.detail << "load TV " << tv << "; ";
  }

  // Laplace-transform consistency route
  {
    struct Case {
      double theta;
      int m;
      double alpha;
      std::vector<double> mtilde;
    };
    const std::vector<Case> cases = {
        {1.0, 1, 4.0, {0.0, 1.0}},
        {1.0, 2, 4.0, {0.3, 0.3, 0.4}},
        {0.5, 1, 3.5, {0.0, 0.6, 0.4}},
    };
    double worst = 0.0;
    for (const auto& cs : cases) {
      // trapezoid-free: integrate the coverage against the nearest-AP
      // distance density on a fine Simpson grid over [0, 6]
      const int segments = 2000;
      const double h = 6.0 / segments;
      double integral = 0.0;
      for (int i = 0; i <= segments; ++i) {
        const double r0 = std::max(1e-9, i * h);
        const double s = cs.theta * cs.m * std::pow(r0, cs.alpha);
        const double f = interference_laplace(s, r0, 1.0, cs.mtilde, cs.alpha) *
                         2.0 * kPi * r0 * std::exp(-kPi * r0 * r0);
        const double w = (i == 0 || i == segments) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        integral += w * f;
      }
      integral *= h / 3.0;
      const double direct =
          1.0 - sir_cdf_conditional(cs.theta, cs.m, cs.mtilde, cs.alpha);
      worst = std::max(worst, std::abs(integral - direct));
    }
    ctx.require(worst <= 1e-5, "Laplace route matches the SIR cdf within 1e-5");
    ctx.detail << "laplace worst " << worst << "; ";
  }

  // campaign determinism
  {
    SystemConfig c = fig2_config(SchemeId::Scheme2, 5, 3, 665501);
    c.theta_grid = {-5.0, 15.0, 5, GridSpec::Scale::Linear};
    c.rate_grid = {0.01, 0.4, 8, GridSpec::Scale::Linear};
    const CampaignResult a = run_campaign(c, 300, 665502);
    const CampaignResult b = run_campaign(c, 300, 665502);
    ctx.require(a.sir_curve.values == b.sir_curve.values &&
                    a.rate_curve.values == b.rate_curve.values &&
                    a.activity_estimate == b.activity_estimate,
                "campaigns bit-identical for a fixed seed");
  }

  detail = ctx.detail.str();
  return ctx.pass;
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* label;
    std::function<bool(std::string&)> run;
  };
  const std::vector<Entry> criteria = {
      {1, "saturated single-antenna baseline", criterion1},
      {2, "analytic vs simulated rate cdf", criterion2},
      {3, "rate-cdf orderings across n and m_max", criterion3},
      {4, "per-subchannel occupancy closed forms", criterion4},
      {5, "optimal subchannel selection", criterion5},
      {6, "property suite", criterion6},
  };

  int failures = 0;
  for (const auto& entry : criteria) {
    std::string detail;
    bool pass = false;
    try {
      pass = entry.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    if (!pass) ++failures;
    std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", entry.id,
                entry.label, detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
