#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bdris/config.hpp"

namespace bdris {

/// Runs task(i) for i in [0, count) on `threads` workers (0 = hardware
/// concurrency). Each task writes only its own output slot, so results do not
/// depend on scheduling. The first exception thrown by any task is rethrown.
void parallel_for(int count, int threads, const std::function<void(int)>& task);

/// Channel realization for one Monte-Carlo trial, shared by every architecture
/// and weight so that comparisons use common random numbers.
ChannelSet draw_channels(const ExperimentConfig& cfg, int trial);
std::uint64_t solver_seed(const ExperimentConfig& cfg, const Architecture& arch, int trial);

/// Diagonal-dominance ratio sum_k F(k,k) / sum_{i != k} F(i,k).
double dominance_ratio(const RMatrix& f);

struct GainMatrixResult {
  struct Entry {
    double eta;
    int i;  // 1-based user index
    int k;  // 1-based precoder index
    double value;
  };
  struct Summary {
    double eta;
    double dominance_ratio;
  };
  std::vector<Entry> entries;
  std::vector<Summary> summaries;
};

struct BeampatternResult {
  struct Row {
    double eta;
    double azimuth_deg;
    double gain_linear;
    double gain_db;
  };
  std::vector<Row> rows;
};

struct TradeoffResult {
  struct Row {
    std::string architecture;
    double eta;
    double mean_rate;
    double mean_gain;
    double mean_gain_db;
    double std_rate;
    double std_gain;
    int trials;
  };
  std::vector<Row> rows;
};

GainMatrixResult run_gain_matrix_experiment(const ExperimentConfig& cfg);
BeampatternResult run_beampattern_experiment(const ExperimentConfig& cfg);
TradeoffResult run_tradeoff_experiment(const ExperimentConfig& cfg);

/// CSV text: one '#' metadata line (experiment, config hash, seed), a header
/// row, then data rows in deterministic order.
std::string to_csv(const GainMatrixResult& r, const ExperimentConfig& cfg);
std::string to_csv(const BeampatternResult& r, const ExperimentConfig& cfg);
std::string to_csv(const TradeoffResult& r, const ExperimentConfig& cfg);

/// Shortest round-trip decimal form.
std::string format_number(double v);

/// SolveReport as JSON text.
std::string report_to_json(const SolveReport& report, const ExperimentConfig& cfg);

/// Writes `<out_dir>/<experiment>_<hash>.csv` plus a `.json` run manifest and
/// returns the CSV path.
std::string write_experiment_output(const std::string& experiment, const std::string& csv,
                                    const ExperimentConfig& cfg, double wall_time_s);

}  // namespace bdris
