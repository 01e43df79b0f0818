#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bdris/ao_driver.hpp"

namespace bdris {

/// Every knob of the experiment harness. Defaults reproduce the reference
/// scenario: BS at (-20, 0, 25) m, RIS at the origin, M = 8, K = 5, 8 x 4
/// elements, 30 dBm transmit power and -100 dBm noise.
struct ExperimentConfig {
  int num_antennas = 8;
  int num_users = 5;
  int n1 = 8;
  int n2 = 4;
  double wavelength = 0.03;
  double p_max_dbm = 30.0;
  double noise_dbm = -100.0;
  double target_elevation_deg = 90.0;
  double target_azimuth_deg = 45.0;
  Vec3 bs_position{-20.0, 0.0, 25.0};
  Vec3 ris_position{0.0, 0.0, 0.0};
  double rician_kappa = 10.0;
  double user_radius_min = 5.0;
  double user_radius_max = 30.0;

  double eta = 0.5;
  std::vector<double> eta_list{0.0, 0.6, 1.0};
  std::string architecture = "fbd";
  std::vector<std::string> architectures{"fbd", "gbd", "dris"};
  int group_size = 4;
  int num_trials = 20;
  int tradeoff_eta_points = 11;
  std::uint64_t seed = 1;

  double outer_tol = 1e-4;
  int max_outer = 50;
  std::optional<double> admm_mu;
  std::optional<double> admm_tol;
  int admm_max_iter = 100;
  bool preserve_dual = false;
  std::optional<double> gain_c;
  std::optional<double> gain_pt;
  int max_elements = kDefaultMaxElements;

  double azimuth_min_deg = 0.0;
  double azimuth_max_deg = 90.0;
  double azimuth_step_deg = 0.5;

  std::string out_dir = ".";
  int threads = 0;  // 0 = hardware concurrency

  int num_elements() const { return n1 * n2; }
  double p_max_watts() const { return dbm_to_watts(p_max_dbm); }
  double noise_watts() const { return dbm_to_watts(noise_dbm); }

  /// Throws ValidationError naming the offending field.
  void validate() const;

  Geometry geometry() const;
  ScenarioParams scenario() const;
  Architecture parse_architecture(const std::string& name) const;
  SolverConfig solver_config(const Architecture& arch, double eta, std::uint64_t seed) const;
  std::vector<double> tradeoff_etas() const;
  std::vector<double> azimuth_grid_deg() const;
};

/// Parses a flat JSON object over the defaults. Unknown keys and type errors
/// raise ParseError; range violations raise ValidationError.
ExperimentConfig load_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

/// Canonical JSON of the result-affecting fields (excludes out_dir, threads).
std::string canonical_json(const ExperimentConfig& cfg);

/// 16 hex digits of FNV-1a over canonical_json().
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace bdris
