#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bdris/aux_phase_solver.hpp"
#include "bdris/phase_solver.hpp"
#include "bdris/precoder_solver.hpp"

namespace bdris {

/// Algorithm-side settings of one alternating-optimization run.
struct SolverConfig {
  Architecture arch = Architecture::fully_connected();
  double eta = 0.5;
  double p_max = 1.0;                 // W
  std::vector<double> noise_powers;   // W, one per user; empty means 1e-13 each
  std::optional<double> gain_c;       // overrides the initialization default
  std::optional<double> gain_pt;
  double outer_tol = 1e-4;
  int max_outer = 50;
  SplittingOptions splitting;         // initial_dual is ignored here
  bool preserve_dual = false;         // carry nu across outer iterations
  int max_elements = kDefaultMaxElements;
  std::uint64_t seed = 1;
};

struct InitialPoint {
  Precoder precoder;
  PhaseShift phase;
  AuxPhases aux;
  GainTargets targets;
};

/// Random feasible Theta, matched-filter W at full power, optimal aux phases,
/// and gain targets on the scale of what this point already achieves.
InitialPoint initialize(const SolverConfig& config, const ChannelSet& ch, Rng& rng);

enum class Stage { Precoder, PhaseShift, AuxPhases };

struct StageEvent {
  int outer_iteration = 0;
  Stage stage = Stage::Precoder;
  const Precoder* precoder = nullptr;
  const PhaseShift* phase = nullptr;
  const AuxPhases* aux = nullptr;
  double objective = 0.0;
};

/// Called after every sub-solver return.
using StageObserver = std::function<void(const StageEvent&)>;

/// Objective values around each block update of one outer iteration.
struct OuterStep {
  double before = 0.0;
  double after_precoder = 0.0;
  double after_phase = 0.0;
  double after_aux = 0.0;
  double lambda = 0.0;
  int splitting_iterations = 0;
  bool splitting_converged = false;
};

struct SolveReport {
  double initial_objective = 0.0;
  std::vector<double> objective_trajectory;  // after each aux-phase step
  std::vector<OuterStep> steps;
  Precoder precoder;
  PhaseShift phase;
  AuxPhases aux;
  GainTargets targets;
  double sum_rate = 0.0;
  std::vector<double> sinr;
  double sensing_gain = 0.0;
  RMatrix gain_matrix;
  double power_slack = 0.0;  // p_max - sum ||w_k||^2
  FeasibilityResiduals feasibility;
  bool converged = false;
  int iterations = 0;
  double wall_time = 0.0;  // seconds
};

/// Alternates precoder, phase-shift and aux-phase updates until the relative
/// objective change drops below outer_tol or max_outer is reached.
SolveReport ao_solve(const SolverConfig& config, const ChannelSet& ch,
                     const StageObserver& observer = {});

}  // namespace bdris
