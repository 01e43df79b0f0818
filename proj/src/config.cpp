#include "bdris/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bdris {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(ErrorCode::ValidationError, field + ": " + why);
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::ParseError, key + ": expected an array of 3 numbers");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

json to_json(const ExperimentConfig& c) {
  return json{
      {"num_antennas", c.num_antennas},
      {"num_users", c.num_users},
      {"n1", c.n1},
      {"n2", c.n2},
      {"wavelength", c.wavelength},
      {"p_max_dbm", c.p_max_dbm},
      {"noise_dbm", c.noise_dbm},
      {"target_elevation_deg", c.target_elevation_deg},
      {"target_azimuth_deg", c.target_azimuth_deg},
      {"bs_position", vec3_json(c.bs_position)},
      {"ris_position", vec3_json(c.ris_position)},
      {"rician_kappa", c.rician_kappa},
      {"user_radius_min", c.user_radius_min},
      {"user_radius_max", c.user_radius_max},
      {"eta", c.eta},
      {"eta_list", c.eta_list},
      {"architecture", c.architecture},
      {"architectures", c.architectures},
      {"group_size", c.group_size},
      {"num_trials", c.num_trials},
      {"tradeoff_eta_points", c.tradeoff_eta_points},
      {"seed", c.seed},
      {"outer_tol", c.outer_tol},
      {"max_outer", c.max_outer},
      {"admm_mu", optional_json(c.admm_mu)},
      {"admm_tol", optional_json(c.admm_tol)},
      {"admm_max_iter", c.admm_max_iter},
      {"preserve_dual", c.preserve_dual},
      {"gain_c", optional_json(c.gain_c)},
      {"gain_pt", optional_json(c.gain_pt)},
      {"max_elements", c.max_elements},
      {"azimuth_min_deg", c.azimuth_min_deg},
      {"azimuth_max_deg", c.azimuth_max_deg},
      {"azimuth_step_deg", c.azimuth_step_deg},
  };
}

void apply_key(ExperimentConfig& c, const std::string& key, const json& v) {
  if (key == "num_antennas") c.num_antennas = v.get<int>();
  else if (key == "num_users") c.num_users = v.get<int>();
  else if (key == "n1") c.n1 = v.get<int>();
  else if (key == "n2") c.n2 = v.get<int>();
  else if (key == "wavelength") c.wavelength = v.get<double>();
  else if (key == "p_max_dbm") c.p_max_dbm = v.get<double>();
  else if (key == "noise_dbm") c.noise_dbm = v.get<double>();
  else if (key == "target_elevation_deg") c.target_elevation_deg = v.get<double>();
  else if (key == "target_azimuth_deg") c.target_azimuth_deg = v.get<double>();
  else if (key == "bs_position") c.bs_position = vec3_from(v, key);
  else if (key == "ris_position") c.ris_position = vec3_from(v, key);
  else if (key == "rician_kappa") c.rician_kappa = v.get<double>();
  else if (key == "user_radius_min") c.user_radius_min = v.get<double>();
  else if (key == "user_radius_max") c.user_radius_max = v.get<double>();
  else if (key == "eta") c.eta = v.get<double>();
  else if (key == "eta_list") c.eta_list = v.get<std::vector<double>>();
  else if (key == "architecture") c.architecture = v.get<std::string>();
  else if (key == "architectures") c.architectures = v.get<std::vector<std::string>>();
  else if (key == "group_size") c.group_size = v.get<int>();
  else if (key == "num_trials") c.num_trials = v.get<int>();
  else if (key == "tradeoff_eta_points") c.tradeoff_eta_points = v.get<int>();
  else if (key == "seed") c.seed = v.get<std::uint64_t>();
  else if (key == "outer_tol") c.outer_tol = v.get<double>();
  else if (key == "max_outer") c.max_outer = v.get<int>();
  else if (key == "admm_mu") c.admm_mu = optional_from(v);
  else if (key == "admm_tol") c.admm_tol = optional_from(v);
  else if (key == "admm_max_iter") c.admm_max_iter = v.get<int>();
  else if (key == "preserve_dual") c.preserve_dual = v.get<bool>();
  else if (key == "gain_c") c.gain_c = optional_from(v);
  else if (key == "gain_pt") c.gain_pt = optional_from(v);
  else if (key == "max_elements") c.max_elements = v.get<int>();
  else if (key == "azimuth_min_deg") c.azimuth_min_deg = v.get<double>();
  else if (key == "azimuth_max_deg") c.azimuth_max_deg = v.get<double>();
  else if (key == "azimuth_step_deg") c.azimuth_step_deg = v.get<double>();
  else if (key == "out_dir") c.out_dir = v.get<std::string>();
  else if (key == "threads") c.threads = v.get<int>();
  else throw Error(ErrorCode::ParseError, key + ": unknown configuration key");
}

void check_eta(const std::string& field, double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) invalid(field, "must lie in [0, 1]");
}

}  // namespace

void ExperimentConfig::validate() const {
  if (num_antennas < 1) invalid("num_antennas", "must be >= 1");
  if (num_users < 1) invalid("num_users", "must be >= 1");
  if (n1 < 1) invalid("n1", "must be >= 1");
  if (n2 < 1) invalid("n2", "must be >= 1");
  if (!(wavelength > 0.0)) invalid("wavelength", "must be > 0");
  if (!std::isfinite(p_max_dbm)) invalid("p_max_dbm", "must be finite");
  if (!std::isfinite(noise_dbm)) invalid("noise_dbm", "must be finite");
  if ((bs_position - ris_position).norm() <= 0.0) invalid("bs_position", "coincides with the RIS");
  if (rician_kappa < 0.0) invalid("rician_kappa", "must be >= 0");
  if (!(user_radius_min > 0.0)) invalid("user_radius_min", "must be > 0");
  if (user_radius_max < user_radius_min) invalid("user_radius_max", "must be >= user_radius_min");
  check_eta("eta", eta);
  if (eta_list.empty()) invalid("eta_list", "must not be empty");
  for (double e : eta_list) check_eta("eta_list", e);
  if (group_size < 1) invalid("group_size", "must be >= 1");
  if (num_elements() % group_size != 0)
    invalid("group_size", "N = " + std::to_string(num_elements()) + " is not divisible by " +
                              std::to_string(group_size));
  for (const auto& name : architectures) parse_architecture(name);
  if (architectures.empty()) invalid("architectures", "must not be empty");
  parse_architecture(architecture);
  if (num_trials < 1) invalid("num_trials", "must be >= 1");
  if (tradeoff_eta_points < 2) invalid("tradeoff_eta_points", "must be >= 2");
  if (!(outer_tol > 0.0)) invalid("outer_tol", "must be > 0");
  if (max_outer < 1) invalid("max_outer", "must be >= 1");
  if (admm_mu && !(*admm_mu > 0.0)) invalid("admm_mu", "must be > 0");
  if (admm_tol && !(*admm_tol > 0.0)) invalid("admm_tol", "must be > 0");
  if (admm_max_iter < 1) invalid("admm_max_iter", "must be >= 1");
  if (gain_c && *gain_c < 0.0) invalid("gain_c", "must be >= 0");
  if (gain_pt && *gain_pt < 0.0) invalid("gain_pt", "must be >= 0");
  if (num_elements() > max_elements)
    invalid("max_elements", "N = " + std::to_string(num_elements()) + " exceeds the cap");
  if (!(azimuth_step_deg > 0.0)) invalid("azimuth_step_deg", "must be > 0");
  if (azimuth_max_deg < azimuth_min_deg) invalid("azimuth_max_deg", "must be >= azimuth_min_deg");
  if (threads < 0) invalid("threads", "must be >= 0");
}

Architecture ExperimentConfig::parse_architecture(const std::string& name) const {
  if (name != "fbd" && name != "gbd" && name != "dris")
    invalid("architecture", "unknown architecture '" + name + "' (expected fbd, gbd or dris)");
  return Architecture::parse(name, group_size);
}

Geometry ExperimentConfig::geometry() const {
  Geometry g;
  g.bs_position = bs_position;
  g.ris_position = ris_position;
  g.target_elevation = target_elevation_deg * kPi / 180.0;
  g.target_azimuth = target_azimuth_deg * kPi / 180.0;
  g.wavelength = wavelength;
  g.n1 = n1;
  g.n2 = n2;
  return g;
}

ScenarioParams ExperimentConfig::scenario() const {
  return {num_antennas, num_users, rician_kappa, user_radius_min, user_radius_max};
}

SolverConfig ExperimentConfig::solver_config(const Architecture& arch, double eta_value,
                                             std::uint64_t solver_seed) const {
  SolverConfig s;
  s.arch = arch;
  s.eta = eta_value;
  s.p_max = p_max_watts();
  s.noise_powers.assign(num_users, noise_watts());
  s.gain_c = gain_c;
  s.gain_pt = gain_pt;
  s.outer_tol = outer_tol;
  s.max_outer = max_outer;
  s.splitting.mu = admm_mu;
  s.splitting.tolerance = admm_tol;
  s.splitting.max_iterations = admm_max_iter;
  s.preserve_dual = preserve_dual;
  s.max_elements = max_elements;
  s.seed = solver_seed;
  return s;
}

std::vector<double> ExperimentConfig::tradeoff_etas() const {
  std::vector<double> out;
  for (int i = 0; i < tradeoff_eta_points; ++i)
    out.push_back(static_cast<double>(i) / (tradeoff_eta_points - 1));
  return out;
}

std::vector<double> ExperimentConfig::azimuth_grid_deg() const {
  std::vector<double> out;
  const auto count =
      static_cast<long>(std::floor((azimuth_max_deg - azimuth_min_deg) / azimuth_step_deg + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(azimuth_min_deg + i * azimuth_step_deg);
  return out;
}

ExperimentConfig load_config_json(const std::string& text) {
  ExperimentConfig cfg;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (doc.is_null()) doc = json::object();
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      apply_key(cfg, key, value);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::ParseError, key + ": " + e.what());
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open configuration file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return load_config_json(buf.str());
}

std::string canonical_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(); }

std::string config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bdris
