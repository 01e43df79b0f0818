#include "bdris/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace bdris {

using nlohmann::json;

namespace {

constexpr std::uint64_t kChannelTag = 0x6368616e6e656cULL;
constexpr std::uint64_t kSolverTag = 0x736f6c766572ULL;

double to_db(double linear) { return 10.0 * std::log10(linear); }

std::string metadata_line(const std::string& experiment, const ExperimentConfig& cfg) {
  return "# bdris " + experiment + " config_hash=" + config_hash(cfg) +
         " seed=" + std::to_string(cfg.seed) + "\n";
}

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

MeanStd mean_std(const std::vector<double>& xs) {
  MeanStd out;
  const double n = static_cast<double>(xs.size());
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / (n - 1.0));
  }
  return out;
}

std::vector<SolveReport> solve_eta_list(const ExperimentConfig& cfg) {
  const ChannelSet ch = draw_channels(cfg, 0);
  const Architecture arch = cfg.parse_architecture(cfg.architecture);
  std::vector<SolveReport> reports(cfg.eta_list.size());
  parallel_for(static_cast<int>(reports.size()), cfg.threads, [&](int idx) {
    reports[idx] = ao_solve(cfg.solver_config(arch, cfg.eta_list[idx], solver_seed(cfg, arch, 0)), ch);
  });
  return reports;
}

json matrix_json(const CMatrix& m) {
  json re = json::array();
  json im = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row_re = json::array();
    json row_im = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      row_re.push_back(m(r, c).real());
      row_im.push_back(m(r, c).imag());
    }
    re.push_back(row_re);
    im.push_back(row_im);
  }
  return {{"re", re}, {"im", im}};
}

json real_matrix_json(const RMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

}  // namespace

void parallel_for(int count, int threads, const std::function<void(int)>& task) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
}

ChannelSet draw_channels(const ExperimentConfig& cfg, int trial) {
  Rng rng(hash_seed(cfg.seed, kChannelTag, static_cast<std::uint64_t>(trial)));
  Geometry geom = cfg.geometry();
  return generate_channels(geom, cfg.scenario(), rng);
}

std::uint64_t solver_seed(const ExperimentConfig& cfg, const Architecture& arch, int trial) {
  return hash_seed(cfg.seed, kSolverTag, static_cast<std::uint64_t>(arch.kind),
                   static_cast<std::uint64_t>(arch.group_size), static_cast<std::uint64_t>(trial));
}

double dominance_ratio(const RMatrix& f) {
  const double diag = f.diagonal().sum();
  return diag / (f.sum() - diag);
}

GainMatrixResult run_gain_matrix_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto reports = solve_eta_list(cfg);
  GainMatrixResult out;
  for (std::size_t e = 0; e < reports.size(); ++e) {
    const RMatrix& f = reports[e].gain_matrix;
    for (Eigen::Index i = 0; i < f.rows(); ++i)
      for (Eigen::Index k = 0; k < f.cols(); ++k)
        out.entries.push_back({cfg.eta_list[e], static_cast<int>(i) + 1, static_cast<int>(k) + 1, f(i, k)});
    out.summaries.push_back({cfg.eta_list[e], dominance_ratio(f)});
  }
  return out;
}

BeampatternResult run_beampattern_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ChannelSet ch = draw_channels(cfg, 0);
  const auto reports = solve_eta_list(cfg);
  const auto grid_deg = cfg.azimuth_grid_deg();
  std::vector<double> grid_rad;
  for (double a : grid_deg) grid_rad.push_back(a * kPi / 180.0);

  BeampatternResult out;
  for (std::size_t e = 0; e < reports.size(); ++e) {
    const auto pattern =
        beampattern(reports[e].phase.theta, ch.bs_ris, reports[e].precoder.w,
                    cfg.target_elevation_deg * kPi / 180.0, grid_rad, cfg.n1, cfg.n2);
    for (std::size_t a = 0; a < pattern.size(); ++a)
      out.rows.push_back({cfg.eta_list[e], grid_deg[a], pattern[a].gain, to_db(pattern[a].gain)});
  }
  return out;
}

TradeoffResult run_tradeoff_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto etas = cfg.tradeoff_etas();
  const int n_arch = static_cast<int>(cfg.architectures.size());
  const int n_eta = static_cast<int>(etas.size());
  const int n_trial = cfg.num_trials;

  std::vector<ChannelSet> channels(n_trial);
  parallel_for(n_trial, cfg.threads, [&](int t) { channels[t] = draw_channels(cfg, t); });

  struct Sample {
    double rate = 0.0;
    double gain = 0.0;
  };
  std::vector<Sample> samples(static_cast<std::size_t>(n_arch) * n_eta * n_trial);
  parallel_for(static_cast<int>(samples.size()), cfg.threads, [&](int idx) {
    const int t = idx % n_trial;
    const int e = (idx / n_trial) % n_eta;
    const int a = idx / (n_trial * n_eta);
    const Architecture arch = cfg.parse_architecture(cfg.architectures[a]);
    const auto report =
        ao_solve(cfg.solver_config(arch, etas[e], solver_seed(cfg, arch, t)), channels[t]);
    samples[idx] = {report.sum_rate, report.sensing_gain};
  });

  TradeoffResult out;
  for (int a = 0; a < n_arch; ++a)
    for (int e = 0; e < n_eta; ++e) {
      std::vector<double> rates;
      std::vector<double> gains;
      for (int t = 0; t < n_trial; ++t) {
        const auto& s = samples[(static_cast<std::size_t>(a) * n_eta + e) * n_trial + t];
        rates.push_back(s.rate);
        gains.push_back(s.gain);
      }
      const auto r = mean_std(rates);
      const auto g = mean_std(gains);
      out.rows.push_back({cfg.architectures[a], etas[e], r.mean, g.mean, to_db(g.mean), r.std,
                          g.std, n_trial});
    }
  return out;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string to_csv(const GainMatrixResult& r, const ExperimentConfig& cfg) {
  std::string out = metadata_line("gain-matrix", cfg);
  out += "row_type,eta,i,k,F_ik,dominance_ratio\n";
  for (const auto& s : r.summaries) {
    for (const auto& e : r.entries)
      if (e.eta == s.eta)
        out += "entry," + format_number(e.eta) + "," + std::to_string(e.i) + "," +
               std::to_string(e.k) + "," + format_number(e.value) + ",\n";
    out += "summary," + format_number(s.eta) + ",,,," + format_number(s.dominance_ratio) + "\n";
  }
  return out;
}

std::string to_csv(const BeampatternResult& r, const ExperimentConfig& cfg) {
  std::string out = metadata_line("beampattern", cfg);
  out += "eta,azimuth_deg,gain_linear,gain_db\n";
  for (const auto& row : r.rows)
    out += format_number(row.eta) + "," + format_number(row.azimuth_deg) + "," +
           format_number(row.gain_linear) + "," + format_number(row.gain_db) + "\n";
  return out;
}

std::string to_csv(const TradeoffResult& r, const ExperimentConfig& cfg) {
  std::string out = metadata_line("tradeoff", cfg);
  out += "architecture,eta,mean_rate,mean_sensing_gain,mean_sensing_gain_db,std_rate,std_gain,trials\n";
  for (const auto& row : r.rows)
    out += row.architecture + "," + format_number(row.eta) + "," + format_number(row.mean_rate) +
           "," + format_number(row.mean_gain) + "," + format_number(row.mean_gain_db) + "," +
           format_number(row.std_rate) + "," + format_number(row.std_gain) + "," +
           std::to_string(row.trials) + "\n";
  return out;
}

std::string report_to_json(const SolveReport& report, const ExperimentConfig& cfg) {
  json steps = json::array();
  for (const auto& s : report.steps)
    steps.push_back({{"before", s.before},
                     {"after_precoder", s.after_precoder},
                     {"after_phase", s.after_phase},
                     {"after_aux", s.after_aux},
                     {"lambda", s.lambda},
                     {"splitting_iterations", s.splitting_iterations},
                     {"splitting_converged", s.splitting_converged}});
  json doc = {
      {"config_hash", config_hash(cfg)},
      {"seed", cfg.seed},
      {"architecture", report.phase.arch.short_name()},
      {"group_size", report.phase.arch.group_size},
      {"eta", report.targets.eta},
      {"gain_targets", {{"C", report.targets.c}, {"P_t", report.targets.p_t}}},
      {"initial_objective", report.initial_objective},
      {"objective_trajectory", report.objective_trajectory},
      {"steps", steps},
      {"converged", report.converged},
      {"iterations", report.iterations},
      {"wall_time_s", report.wall_time},
      {"sum_rate_bps_hz", report.sum_rate},
      {"sinr", report.sinr},
      {"sensing_gain", report.sensing_gain},
      {"sensing_gain_db", to_db(report.sensing_gain)},
      {"gain_matrix", real_matrix_json(report.gain_matrix)},
      {"constraint_residuals",
       {{"power_slack", report.power_slack},
        {"unitarity", report.feasibility.unitarity},
        {"symmetry", report.feasibility.symmetry},
        {"off_structure", report.feasibility.off_structure},
        {"modulus", report.feasibility.modulus}}},
      {"W", matrix_json(report.precoder.w)},
      {"Theta", matrix_json(report.phase.theta)},
      {"aux", {{"theta", real_matrix_json(report.aux.theta)},
               {"phi", std::vector<double>(report.aux.phi.begin(), report.aux.phi.end())}}},
  };
  return doc.dump(2);
}

std::string write_experiment_output(const std::string& experiment, const std::string& csv,
                                    const ExperimentConfig& cfg, double wall_time_s) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  const std::string stem = experiment + "_" + config_hash(cfg);
  const fs::path csv_path = fs::path(cfg.out_dir) / (stem + ".csv");
  {
    std::ofstream out(csv_path, std::ios::binary);
    out << csv;
    if (!out) throw std::runtime_error("failed to write " + csv_path.string());
  }
  const json manifest = {{"experiment", experiment},
                         {"config_hash", config_hash(cfg)},
                         {"seed", cfg.seed},
                         {"csv", csv_path.filename().string()},
                         {"wall_time_s", wall_time_s},
                         {"config", json::parse(canonical_json(cfg))}};
  std::ofstream(fs::path(cfg.out_dir) / (stem + ".json")) << manifest.dump(2) << "\n";
  return csv_path.string();
}

}  // namespace bdris
