#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "smallcell/access.hpp"
#include "smallcell/analytic.hpp"
#include "smallcell/simulate.hpp"

namespace smallcell {

double db_to_linear(double db);
double linear_to_db(double linear);

struct GridSpec {
  double min_value = 0.0;
  double max_value = 1.0;
  int points = 2;
  enum class Scale { Linear, Log } scale = Scale::Linear;

  std::vector<double> build() const;
  bool operator==(const GridSpec&) const = default;
};

/// One experiment definition: physics, scheme, window, grids and seeds.
/// Everything a run needs is here so campaigns are reproducible from the
/// JSON dump alone.
struct SystemConfig {
  double ratio = 10.0;
  double alpha = 4.0;
  double theta0_db = 0.0;
  int n = 50;
  int m_max = 1;
  SchemeId scheme = SchemeId::Scheme1;
  int k_max = 256;
  SimWindow window;
  long long mc_samples = 10000;
  long long pmf_samples = 1'000'000;
  PmfMethod::Kind pmf_method = PmfMethod::Kind::Auto;
  std::uint64_t base_seed = kDefaultBaseSeed;
  int jobs = 1;
  GridSpec theta_grid{-10.0, 20.0, 61, GridSpec::Scale::Linear};  // dB
  GridSpec rate_grid{0.005, 0.5, 100, GridSpec::Scale::Linear};   // b/s/Hz
  bool all_active = false;
  bool equal_time_share = false;  // experimental TDMA share rule

  double theta0_linear() const { return db_to_linear(theta0_db); }
  ChannelParams channel_params() const { return {alpha, theta0_linear()}; }
  TimeShare time_share() const {
    return equal_time_share ? TimeShare::EqualPerGroup
                            : TimeShare::ProportionalToGroupSize;
  }
  SchemeOptions scheme_options() const {
    return {scheme, n, m_max, time_share(), all_active};
  }
  PmfMethod pmf() const { return {pmf_method, pmf_samples, base_seed}; }
  std::vector<double> theta_grid_linear() const;

  void validate() const;  // throws InvalidParameter

  bool operator==(const SystemConfig&) const = default;
};

/// Profile for the config's own (scheme, n): the entry point the CLI uses.
AccessProfile access_profile_for(const SystemConfig& config);

SystemConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const SystemConfig& config, int indent = 2);
SystemConfig load_config_file(const std::string& path);

/// FNV-1a hash of the canonical dump with runtime-only fields (jobs)
/// excluded; stamped into CSV headers.
std::string config_hash_hex(const SystemConfig& config);

std::string to_string(SchemeId scheme);
std::string to_string(PmfMethod::Kind kind);

}  // namespace smallcell
