#include "bdris/ao_driver.hpp"

#include <chrono>
#include <cmath>

namespace bdris {

InitialPoint initialize(const SolverConfig& config, const ChannelSet& ch, Rng& rng) {
  const int n = ch.num_elements();
  const int k_users = ch.num_users();

  InitialPoint init;
  init.phase = project(cscg_matrix(n, n, rng), config.arch);

  const CMatrix matched = ch.bs_ris.adjoint() * init.phase.theta.adjoint() * ch.user_matrix();
  const double norm = matched.norm();
  init.precoder.w = norm > 0.0 ? CMatrix(matched * (std::sqrt(config.p_max) / norm))
                               : CMatrix::Zero(ch.num_antennas(), k_users);
  init.aux = optimal_aux_phases(ch, init.phase.theta, init.precoder.w);

  const CMatrix composite = init.phase.theta * ch.bs_ris * init.precoder.w;
  const CMatrix hw = ch.user_matrix().adjoint() * composite;
  const Eigen::RowVectorXcd sense = ch.target.adjoint() * composite;
  double diag_mean = 0.0;
  double sense_mean = 0.0;
  for (int k = 0; k < k_users; ++k) {
    diag_mean += std::abs(hw(k, k)) / k_users;
    sense_mean += std::abs(sense(k)) / k_users;
  }
  init.targets.eta = config.eta;
  init.targets.c = config.gain_c.value_or(diag_mean);
  init.targets.p_t = config.gain_pt.value_or(std::sqrt(static_cast<double>(n)) * sense_mean);
  init.targets.validate();
  return init;
}

SolveReport ao_solve(const SolverConfig& config, const ChannelSet& ch,
                     const StageObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  const int n = ch.num_elements();
  if (n > config.max_elements)
    throw Error(ErrorCode::MemoryGuard, "N exceeds the configured element cap");

  Rng rng(config.seed);
  InitialPoint init = initialize(config, ch, rng);

  SolveReport report;
  report.targets = init.targets;
  Precoder precoder = std::move(init.precoder);
  PhaseShift phase = std::move(init.phase);
  AuxPhases aux = std::move(init.aux);
  const GainTargets& targets = report.targets;

  auto eval = [&] { return objective(precoder.w, phase.theta, aux, targets, ch); };
  auto notify = [&](int iteration, Stage stage, double value) {
    if (observer) observer({iteration, stage, &precoder, &phase, &aux, value});
  };

  // Below this the gain-matching residual is rounding noise.
  const double k_users = ch.num_users();
  const double floor = 1e-20 * (targets.eta * k_users * targets.c * targets.c +
                                (1.0 - targets.eta) * k_users * targets.p_t * targets.p_t);

  report.initial_objective = eval();
  double previous = report.initial_objective;
  std::optional<CVector> dual;

  for (int it = 0; it < config.max_outer; ++it) {
    OuterStep step;
    step.before = previous;

    const auto pre = solve_precoders(assemble_precoder_quadratic(ch, phase.theta, aux, targets),
                                     config.p_max);
    precoder = pre.precoder;
    step.lambda = pre.lambda;
    step.after_precoder = eval();
    notify(it, Stage::Precoder, step.after_precoder);

    SplittingOptions split = config.splitting;
    split.initial_dual = config.preserve_dual ? dual : std::nullopt;
    auto sr = splitting_solve(
        assemble_psi_quadratic(ch, precoder.w, aux, targets, config.max_elements), config.arch,
        phase, split);
    phase = std::move(sr.phase);
    dual = std::move(sr.dual);
    step.splitting_iterations = sr.iterations;
    step.splitting_converged = sr.converged;
    step.after_phase = eval();
    notify(it, Stage::PhaseShift, step.after_phase);

    aux = optimal_aux_phases(ch, phase.theta, precoder.w);
    step.after_aux = eval();
    notify(it, Stage::AuxPhases, step.after_aux);

    report.steps.push_back(step);
    report.objective_trajectory.push_back(step.after_aux);
    report.iterations = it + 1;

    const double change = std::abs(previous - step.after_aux);
    previous = step.after_aux;
    if (step.after_aux <= floor || change < config.outer_tol * std::abs(step.before)) {
      report.converged = true;
      break;
    }
  }

  report.precoder = std::move(precoder);
  report.phase = std::move(phase);
  report.aux = std::move(aux);

  const std::vector<double> noise = config.noise_powers.empty()
                                        ? std::vector<double>(ch.num_users(), 1e-13)
                                        : config.noise_powers;
  report.gain_matrix =
      beam_gain_matrix(effective_channels(ch, report.phase.theta), report.precoder.w);
  const auto rate = sinr_and_rate(report.gain_matrix, noise);
  report.sinr = rate.sinr;
  report.sum_rate = rate.sum_rate;
  report.sensing_gain = sensing_gain(ch.target, report.phase.theta, ch.bs_ris, report.precoder.w);
  report.power_slack = config.p_max - report.precoder.total_power();
  report.feasibility = feasibility_residuals(report.phase);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace bdris
