// Experiment driver: gain-matrix, beampattern, tradeoff and single solves.

#include <chrono>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "bdris/experiments.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string eta;
  std::string arch;
  std::optional<int> group_size;
  std::optional<int> trials;
  std::string out;
  std::optional<int> threads;
};

void add_common_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "Flat JSON configuration file");
  cmd->add_option("--seed", o.seed, "Master RNG seed");
  cmd->add_option("--eta", o.eta, "Weight, or comma-separated list of weights");
  cmd->add_option("--arch", o.arch, "RIS architecture")
      ->check(CLI::IsMember({"fbd", "gbd", "dris"}));
  cmd->add_option("--group-size", o.group_size, "Group size for gbd");
  cmd->add_option("--trials", o.trials, "Monte-Carlo trials per point");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
}

std::vector<double> parse_eta_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw bdris::Error(bdris::ErrorCode::ParseError, "eta: cannot parse '" + item + "'");
    }
  }
  return out;
}

bdris::ExperimentConfig resolve(const Overrides& o) {
  bdris::ExperimentConfig cfg =
      o.config_path.empty() ? bdris::ExperimentConfig{} : bdris::load_config_file(o.config_path);
  if (o.seed) cfg.seed = *o.seed;
  if (!o.eta.empty()) {
    cfg.eta_list = parse_eta_list(o.eta);
    if (!cfg.eta_list.empty()) cfg.eta = cfg.eta_list.front();
  }
  if (!o.arch.empty()) {
    cfg.architecture = o.arch;
    cfg.architectures = {o.arch};
  }
  if (o.group_size) cfg.group_size = *o.group_size;
  if (o.trials) cfg.num_trials = *o.trials;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

template <typename Run>
int run_experiment(const std::string& name, const Overrides& o, Run run) {
  const auto cfg = resolve(o);
  const auto start = std::chrono::steady_clock::now();
  const auto result = run(cfg);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const auto path = bdris::write_experiment_output(name, bdris::to_csv(result, cfg), cfg, elapsed);
  std::cout << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BD-RIS ISAC joint precoding and phase-shift optimizer"};
  app.require_subcommand(1);

  Overrides gain_o, beam_o, trade_o, solve_o;
  auto* gain = app.add_subcommand("gain-matrix", "Beam-gain matrix F per weight");
  auto* beam = app.add_subcommand("beampattern", "Azimuth beam pattern per weight");
  auto* trade = app.add_subcommand("tradeoff", "Rate versus sensing gain frontier");
  auto* solve = app.add_subcommand("solve", "Single run; prints the full report as JSON");
  add_common_flags(gain, gain_o);
  add_common_flags(beam, beam_o);
  add_common_flags(trade, trade_o);
  add_common_flags(solve, solve_o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gain)
      return run_experiment("gain-matrix", gain_o, bdris::run_gain_matrix_experiment);
    if (*beam)
      return run_experiment("beampattern", beam_o, bdris::run_beampattern_experiment);
    if (*trade)
      return run_experiment("tradeoff", trade_o, bdris::run_tradeoff_experiment);
    if (*solve) {
      const auto cfg = resolve(solve_o);
      const auto arch = cfg.parse_architecture(cfg.architecture);
      const auto ch = bdris::draw_channels(cfg, 0);
      const auto report =
          bdris::ao_solve(cfg.solver_config(arch, cfg.eta, bdris::solver_seed(cfg, arch, 0)), ch);
      std::cout << bdris::report_to_json(report, cfg) << "\n";
      return 0;
    }
  } catch (const bdris::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
