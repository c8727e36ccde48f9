#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "smallcell/analytic.hpp"
#include "smallcell/config.hpp"
#include "smallcell/load_model.hpp"
#include "smallcell/optimize.hpp"
#include "smallcell/simulate.hpp"
#include "smallcell/stats.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace smallcell;

struct Overrides {
  std::string config_path;
  std::string out_path;
  std::string dump_samples_path;
  bool with_mc = false;
  bool dump_config = false;
  bool all_active = false;
  bool equal_time_share = false;
  std::optional<double> ratio, alpha, theta0_db, radius, guard, r0;
  std::optional<int> n, m_max, k_max, jobs, n_max;
  std::optional<long long> mc_samples, pmf_samples;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> scheme, pmf_method;
  std::optional<std::vector<double>> theta_grid, rate_grid;  // min,max,points
};

void add_common_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON config file");
  cmd->add_option("--out", o.out_path, "output path (default: stdout)");
  cmd->add_option("--seed", o.seed, "base seed (default: fixed constant)");
  cmd->add_option("--jobs", o.jobs, "parallel workers for MC realizations");
  cmd->add_option("--ratio", o.ratio, "user-to-AP density ratio");
  cmd->add_option("--alpha", o.alpha, "path-loss exponent (> 2)");
  cmd->add_option("--theta0-db", o.theta0_db, "SIR threshold in dB");
  cmd->add_option("--n", o.n, "number of subchannels");
  cmd->add_option("--m-max", o.m_max, "transmit antennas per AP");
  cmd->add_option("--scheme", o.scheme, "scheme1 | scheme2");
  cmd->add_option("--k-max", o.k_max, "load pmf truncation bound");
  cmd->add_option("--mc-samples", o.mc_samples, "campaign realizations");
  cmd->add_option("--pmf-samples", o.pmf_samples, "samples per estimated pmf");
  cmd->add_option("--pmf-method", o.pmf_method, "auto | exact | mc");
  cmd->add_option("--radius", o.radius, "simulation window radius");
  cmd->add_option("--guard", o.guard, "guard fraction in (0,1)");
  cmd->add_option("--theta-grid", o.theta_grid,
                  "theta grid in dB: min max points")
      ->expected(3);
  cmd->add_option("--rate-grid", o.rate_grid, "rate grid: min max points")
      ->expected(3);
  cmd->add_flag("--all-active", o.all_active,
                "saturated baseline: every AP active with a full group");
  cmd->add_flag("--equal-time-share", o.equal_time_share,
                "experimental equal-per-group TDMA share rule");
  cmd->add_flag("--dump-config", o.dump_config,
                "print the effective config as JSON and exit");
}

SystemConfig build_config(const Overrides& o) {
  SystemConfig c;
  if (!o.config_path.empty()) c = load_config_file(o.config_path);
  if (o.ratio) c.ratio = *o.ratio;
  if (o.alpha) c.alpha = *o.alpha;
  if (o.theta0_db) c.theta0_db = *o.theta0_db;
  if (o.n) c.n = *o.n;
  if (o.m_max) c.m_max = *o.m_max;
  if (o.scheme) {
    if (*o.scheme == "scheme1")
      c.scheme = SchemeId::Scheme1;
    else if (*o.scheme == "scheme2")
      c.scheme = SchemeId::Scheme2;
    else
      throw InvalidParameter("--scheme must be scheme1 or scheme2");
  }
  if (o.k_max) c.k_max = *o.k_max;
  if (o.radius) c.window.radius = *o.radius;
  if (o.guard) c.window.guard_fraction = *o.guard;
  if (o.mc_samples) c.mc_samples = *o.mc_samples;
  if (o.pmf_samples) c.pmf_samples = *o.pmf_samples;
  if (o.pmf_method) {
    if (*o.pmf_method == "auto")
      c.pmf_method = PmfMethod::Kind::Auto;
    else if (*o.pmf_method == "exact")
      c.pmf_method = PmfMethod::Kind::Exact;
    else if (*o.pmf_method == "mc")
      c.pmf_method = PmfMethod::Kind::MonteCarlo;
    else
      throw InvalidParameter("--pmf-method must be auto, exact or mc");
  }
  if (o.seed) c.base_seed = *o.seed;
  if (o.jobs) c.jobs = *o.jobs;
  if (o.theta_grid)
    c.theta_grid = {(*o.theta_grid)[0], (*o.theta_grid)[1],
                    static_cast<int>((*o.theta_grid)[2]),
                    GridSpec::Scale::Linear};
  if (o.rate_grid)
    c.rate_grid = {(*o.rate_grid)[0], (*o.rate_grid)[1],
                   static_cast<int>((*o.rate_grid)[2]),
                   GridSpec::Scale::Linear};
  if (o.all_active) c.all_active = true;
  if (o.equal_time_share) c.equal_time_share = true;
  c.validate();
  return c;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) throw InvalidParameter("cannot open output file " + path);
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_header(std::ostream& os, const SystemConfig& c,
                  const std::string& command, const std::string& columns) {
  os << "# smallcell-csv v1\n"
     << "# command=" << command << " config_hash=" << config_hash_hex(c)
     << " seed=" << c.base_seed << " version=" << kVersion << "\n"
     << "# columns: " << columns << "\n"
     << columns << "\n";
}

int cmd_sir_cdf(const Overrides& o) {
  const SystemConfig config = build_config(o);
  Output out(o.out_path);
  if (o.dump_config) {
    out.stream() << config_to_json_text(config) << "\n";
    return 0;
  }
  const AccessProfile profile = access_profile_for(config);
  const std::vector<double> thetas_db = config.theta_grid.build();
  const std::vector<double> thetas = config.theta_grid_linear();
  const CdfCurve curve = sir_cdf_curve(thetas, profile, config.channel_params());
  write_header(out.stream(), config, "sir-cdf",
               "theta_db,theta_linear,f_sir_analytic");
  for (std::size_t i = 0; i < thetas.size(); ++i)
    out.stream() << fmt(thetas_db[i]) << "," << fmt(thetas[i]) << ","
                 << fmt(curve.values[i]) << "\n";
  return 0;
}

int cmd_rate_cdf(const Overrides& o) {
  const SystemConfig config = build_config(o);
  Output out(o.out_path);
  if (o.dump_config) {
    out.stream() << config_to_json_text(config) << "\n";
    return 0;
  }
  const AccessProfile profile = access_profile_for(config);
  const std::vector<double> rates = config.rate_grid.build();
  const CdfCurve analytic =
      rate_cdf_curve(rates, profile, config.n, config.channel_params());

  if (!o.with_mc) {
    write_header(out.stream(), config, "rate-cdf", "r,f_r_analytic");
    for (std::size_t i = 0; i < rates.size(); ++i)
      out.stream() << fmt(rates[i]) << "," << fmt(analytic.values[i]) << "\n";
    return 0;
  }

  const CampaignResult campaign =
      run_campaign(config, config.mc_samples, config.base_seed);
  write_header(out.stream(), config, "rate-cdf",
               "r,f_r_analytic,f_r_empirical,ci_low,ci_high");
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double emp = campaign.rate_curve.values[i];
    const Interval ci = wilson_interval(emp, config.mc_samples);
    out.stream() << fmt(rates[i]) << "," << fmt(analytic.values[i]) << ","
                 << fmt(emp) << "," << fmt(ci.low) << "," << fmt(ci.high)
                 << "\n";
  }
  return 0;
}

int cmd_simulate(const Overrides& o) {
  const SystemConfig config = build_config(o);
  Output out(o.out_path);
  if (o.dump_config) {
    out.stream() << config_to_json_text(config) << "\n";
    return 0;
  }
  std::vector<SampleRecord> samples;
  const CampaignResult campaign =
      run_campaign(config, config.mc_samples, config.base_seed,
                   o.dump_samples_path.empty() ? nullptr : &samples);

  if (!o.dump_samples_path.empty()) {
    std::ofstream sf(o.dump_samples_path);
    if (!sf)
      throw InvalidParameter("cannot open " + o.dump_samples_path);
    sf << "seed,sir,k0,m,rate\n";
    for (const auto& s : samples)
      sf << s.seed << "," << fmt(s.sir) << "," << s.k0 << "," << s.m << ","
         << fmt(s.rate) << "\n";
  }

  write_header(out.stream(), config, "simulate",
               "kind,x,f_empirical,ci_low,ci_high");
  const auto& d = campaign.diagnostics;
  out.stream() << "# activity_estimate=" << fmt(campaign.activity_estimate)
               << " activity_observations=" << d.activity_observations
               << " mean_ap_count=" << fmt(d.mean_ap_count)
               << " degenerate_resamples=" << d.degenerate_resamples
               << " guard_resamples=" << d.guard_resamples << "\n";
  const std::vector<double> thetas_db = config.theta_grid.build();
  for (std::size_t i = 0; i < thetas_db.size(); ++i) {
    const double emp = campaign.sir_curve.values[i];
    const Interval ci = wilson_interval(emp, config.mc_samples);
    out.stream() << "sir," << fmt(thetas_db[i]) << "," << fmt(emp) << ","
                 << fmt(ci.low) << "," << fmt(ci.high) << "\n";
  }
  for (std::size_t i = 0; i < campaign.rate_curve.abscissae.size(); ++i) {
    const double emp = campaign.rate_curve.values[i];
    const Interval ci = wilson_interval(emp, config.mc_samples);
    out.stream() << "rate," << fmt(campaign.rate_curve.abscissae[i]) << ","
                 << fmt(emp) << "," << fmt(ci.low) << "," << fmt(ci.high)
                 << "\n";
  }
  return 0;
}

int cmd_optimize(const Overrides& o) {
  const SystemConfig config = build_config(o);
  Output out(o.out_path);
  if (o.dump_config) {
    out.stream() << config_to_json_text(config) << "\n";
    return 0;
  }
  const int n_max = o.n_max.value_or(200);
  ProfileCache cache(config.scheme, config.ratio, config.k_max, config.m_max,
                     config.pmf_method, config.pmf_samples, config.base_seed,
                     config.time_share(), config.all_active);
  std::vector<double> r_values;
  if (o.r0)
    r_values.push_back(*o.r0);
  else
    r_values = config.rate_grid.build();

  write_header(out.stream(), config, "optimize",
               "r0,n_star,outage,outage_at_n1");
  for (double r0 : r_values) {
    const OptimizationResult res =
        optimal_subchannels(r0, n_max, cache, config.channel_params());
    out.stream() << fmt(res.r0) << "," << res.n_star << "," << fmt(res.outage)
                 << "," << fmt(res.outage_at_n1) << "\n";
  }
  return 0;
}

int cmd_activity(const Overrides& o) {
  const SystemConfig config = build_config(o);
  Output out(o.out_path);
  if (o.dump_config) {
    out.stream() << config_to_json_text(config) << "\n";
    return 0;
  }
  const LoadPmf load = cell_load_pmf(config.ratio, 3.5, config.k_max);
  const double closed =
      subchannel_activity_probability(config.scheme, load, config.n,
                                      config.m_max);
  if (!o.with_mc) {
    write_header(out.stream(), config, "activity",
                 "scheme,n,m_max,ratio,activity_closed_form");
    out.stream() << to_string(config.scheme) << "," << config.n << ","
                 << config.m_max << "," << fmt(config.ratio) << ","
                 << fmt(closed) << "\n";
    return 0;
  }
  const CampaignResult campaign =
      run_campaign(config, config.mc_samples, config.base_seed);
  const double p_hat = campaign.activity_estimate;
  const long long obs = campaign.diagnostics.activity_observations;
  const double se = obs > 0 ? std::sqrt(p_hat * (1.0 - p_hat) / obs) : 0.0;
  write_header(out.stream(), config, "activity",
               "scheme,n,m_max,ratio,activity_closed_form,activity_mc,mc_stderr");
  out.stream() << to_string(config.scheme) << "," << config.n << ","
               << config.m_max << "," << fmt(config.ratio) << "," << fmt(closed)
               << "," << fmt(p_hat) << "," << fmt(se) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"downlink SIR and user-rate distributions of randomly deployed "
               "small-cell networks"};
  app.require_subcommand(1);

  Overrides o;
  auto* sir = app.add_subcommand("sir-cdf", "analytic SIR cdf over a theta grid");
  auto* rate = app.add_subcommand("rate-cdf", "analytic (and optionally "
                                              "simulated) user-rate cdf");
  auto* sim = app.add_subcommand("simulate", "Monte Carlo campaign only");
  auto* opt = app.add_subcommand("optimize", "optimal subchannel count per "
                                             "target rate");
  auto* act = app.add_subcommand("activity", "subchannel activity probability");
  for (auto* cmd : {sir, rate, sim, opt, act}) add_common_options(cmd, o);
  rate->add_flag("--with-mc", o.with_mc, "add empirical curve with Wilson CIs");
  act->add_flag("--with-mc", o.with_mc, "add MC activity estimate");
  sim->add_option("--dump-samples", o.dump_samples_path,
                  "write per-sample records to this CSV");
  opt->add_option("--r0", o.r0, "single target rate (default: rate grid)");
  opt->add_option("--n-max", o.n_max, "search bound for n (default 200)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sir->parsed()) return cmd_sir_cdf(o);
    if (rate->parsed()) return cmd_rate_cdf(o);
    if (sim->parsed()) return cmd_simulate(o);
    if (opt->parsed()) return cmd_optimize(o);
    if (act->parsed()) return cmd_activity(o);
  } catch (const InvalidParameter& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const TailMassTooLarge& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const EnumerationTooLarge& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
