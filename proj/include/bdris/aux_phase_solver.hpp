#pragma once

#include "bdris/system_model.hpp"

namespace bdris {

/// Closed-form minimizer of |zeta - r e^{j xi}|^2 over xi for any r >= 0:
/// the phase of zeta wrapped into [0, 2pi), with angle(0) = 0.
inline double optimal_phase(Complex zeta) { return wrapped_angle(zeta); }

/// theta(i, k) = angle(f_i^H Theta G w_k), phi(k) = angle(f_t^H Theta G w_k).
AuxPhases optimal_aux_phases(const ChannelSet& ch, const CMatrix& theta, const CMatrix& w);

}  // namespace bdris
