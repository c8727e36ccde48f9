#include "smallcell/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace smallcell {

using nlohmann::json;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

std::vector<double> GridSpec::build() const {
  if (points < 1) throw InvalidParameter("GridSpec: points must be >= 1");
  if (points == 1) return {min_value};
  if (!(max_value > min_value))
    throw InvalidParameter("GridSpec: max must exceed min");
  std::vector<double> grid(points);
  if (scale == Scale::Linear) {
    const double step = (max_value - min_value) / (points - 1);
    for (int i = 0; i < points; ++i) grid[i] = min_value + i * step;
  } else {
    if (!(min_value > 0.0))
      throw InvalidParameter("GridSpec: log scale requires min > 0");
    const double step = std::log(max_value / min_value) / (points - 1);
    for (int i = 0; i < points; ++i)
      grid[i] = min_value * std::exp(i * step);
  }
  grid.back() = max_value;
  return grid;
}

std::vector<double> SystemConfig::theta_grid_linear() const {
  std::vector<double> grid = theta_grid.build();
  for (double& g : grid) g = db_to_linear(g);
  return grid;
}

void SystemConfig::validate() const {
  if (!(ratio > 0.0)) throw InvalidParameter("config: ratio must be > 0");
  if (!(alpha > 2.0)) throw InvalidParameter("config: alpha must be > 2");
  if (!std::isfinite(theta0_db))
    throw InvalidParameter("config: theta0_db must be finite");
  if (n < 1) throw InvalidParameter("config: n must be >= 1");
  if (m_max < 1) throw InvalidParameter("config: m_max must be >= 1");
  if (k_max < 1) throw InvalidParameter("config: k_max must be >= 1");
  if (!(window.radius >= 10.0))
    throw InvalidParameter("config: window radius must be >= 10");
  if (!(window.guard_fraction > 0.0 && window.guard_fraction < 1.0))
    throw InvalidParameter("config: guard_fraction must be in (0,1)");
  if (mc_samples < 100)
    throw InvalidParameter("config: mc_samples must be >= 100");
  if (pmf_samples < 1)
    throw InvalidParameter("config: pmf_samples must be >= 1");
  if (jobs < 1) throw InvalidParameter("config: jobs must be >= 1");
  theta_grid.build();
  rate_grid.build();
  if (!(rate_grid.min_value > 0.0))
    throw InvalidParameter("config: rate grid must start above 0");
}

AccessProfile access_profile_for(const SystemConfig& config) {
  return build_access_profile(config.scheme, config.ratio, config.k_max,
                              config.n, config.m_max, config.pmf(),
                              config.time_share(), config.all_active);
}

std::string to_string(SchemeId scheme) {
  return scheme == SchemeId::Scheme1 ? "scheme1" : "scheme2";
}

std::string to_string(PmfMethod::Kind kind) {
  switch (kind) {
    case PmfMethod::Kind::Auto:
      return "auto";
    case PmfMethod::Kind::Exact:
      return "exact";
    case PmfMethod::Kind::MonteCarlo:
      return "mc";
  }
  return "auto";
}

namespace {

SchemeId scheme_from_string(const std::string& s) {
  if (s == "scheme1") return SchemeId::Scheme1;
  if (s == "scheme2") return SchemeId::Scheme2;
  throw InvalidParameter("config: scheme must be scheme1 or scheme2");
}

PmfMethod::Kind pmf_method_from_string(const std::string& s) {
  if (s == "auto") return PmfMethod::Kind::Auto;
  if (s == "exact") return PmfMethod::Kind::Exact;
  if (s == "mc") return PmfMethod::Kind::MonteCarlo;
  throw InvalidParameter("config: pmf_method must be auto, exact or mc");
}

json grid_to_json(const GridSpec& grid) {
  return json{{"min", grid.min_value},
              {"max", grid.max_value},
              {"points", grid.points},
              {"scale", grid.scale == GridSpec::Scale::Linear ? "linear" : "log"}};
}

GridSpec grid_from_json(const json& j, const GridSpec& defaults) {
  GridSpec grid = defaults;
  grid.min_value = j.value("min", grid.min_value);
  grid.max_value = j.value("max", grid.max_value);
  grid.points = j.value("points", grid.points);
  if (j.contains("scale")) {
    const std::string s = j.at("scale").get<std::string>();
    if (s == "linear")
      grid.scale = GridSpec::Scale::Linear;
    else if (s == "log")
      grid.scale = GridSpec::Scale::Log;
    else
      throw InvalidParameter("config: grid scale must be linear or log");
  }
  return grid;
}

json config_to_json(const SystemConfig& c) {
  return json{{"ratio", c.ratio},
              {"alpha", c.alpha},
              {"theta0_db", c.theta0_db},
              {"n", c.n},
              {"m_max", c.m_max},
              {"scheme", to_string(c.scheme)},
              {"k_max", c.k_max},
              {"window",
               {{"radius", c.window.radius},
                {"guard_fraction", c.window.guard_fraction}}},
              {"mc_samples", c.mc_samples},
              {"pmf_samples", c.pmf_samples},
              {"pmf_method", to_string(c.pmf_method)},
              {"base_seed", c.base_seed},
              {"jobs", c.jobs},
              {"theta_grid", grid_to_json(c.theta_grid)},
              {"rate_grid", grid_to_json(c.rate_grid)},
              {"all_active", c.all_active},
              {"equal_time_share", c.equal_time_share}};
}

}  // namespace

SystemConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config: invalid JSON: ") + e.what());
  }
  SystemConfig c;
  try {
    c.ratio = j.value("ratio", c.ratio);
    c.alpha = j.value("alpha", c.alpha);
    c.theta0_db = j.value("theta0_db", c.theta0_db);
    c.n = j.value("n", c.n);
    c.m_max = j.value("m_max", c.m_max);
    if (j.contains("scheme"))
      c.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    c.k_max = j.value("k_max", c.k_max);
    if (j.contains("window")) {
      const auto& w = j.at("window");
      c.window.radius = w.value("radius", c.window.radius);
      c.window.guard_fraction =
          w.value("guard_fraction", c.window.guard_fraction);
    }
    c.mc_samples = j.value("mc_samples", c.mc_samples);
    c.pmf_samples = j.value("pmf_samples", c.pmf_samples);
    if (j.contains("pmf_method"))
      c.pmf_method =
          pmf_method_from_string(j.at("pmf_method").get<std::string>());
    c.base_seed = j.value("base_seed", c.base_seed);
    c.jobs = j.value("jobs", c.jobs);
    if (j.contains("theta_grid"))
      c.theta_grid = grid_from_json(j.at("theta_grid"), c.theta_grid);
    if (j.contains("rate_grid"))
      c.rate_grid = grid_from_json(j.at("rate_grid"), c.rate_grid);
    c.all_active = j.value("all_active", c.all_active);
    c.equal_time_share = j.value("equal_time_share", c.equal_time_share);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("config: bad field type: ") + e.what());
  }
  return c;
}

std::string config_to_json_text(const SystemConfig& config, int indent) {
  return config_to_json(config).dump(indent);
}

SystemConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("config: cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return config_from_json_text(buffer.str());
}

std::string config_hash_hex(const SystemConfig& config) {
  json j = config_to_json(config);
  j.erase("jobs");
  const std::string text = j.dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    hash ^= ch;
    hash *= 0x100000001b3ULL;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(hash));
  return std::string(out);
}

}  // namespace smallcell
