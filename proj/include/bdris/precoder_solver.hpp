#pragma once

#include "bdris/system_model.hpp"

namespace bdris {

/// sum_k w_k^H A w_k - 2 Re{b_k^H w_k}, the precoder subproblem objective.
struct PrecoderQuadratic {
  CMatrix a;  // M x M, Hermitian PSD
  CMatrix b;  // M x K, column k is b_k

  double evaluate(const CMatrix& w) const;
};

PrecoderQuadratic assemble_precoder_quadratic(const ChannelSet& ch, const CMatrix& theta,
                                              const AuxPhases& aux, const GainTargets& targets);

struct PrecoderSolution {
  Precoder precoder;
  double lambda = 0.0;
  int bisection_steps = 0;
  bool ridge_applied = false;
};

/// Minimizes the quadratic under sum_k ||w_k||^2 <= p_max with a single shared
/// multiplier found by bisection.
PrecoderSolution solve_precoders(const PrecoderQuadratic& quad, double p_max);

}  // namespace bdris
