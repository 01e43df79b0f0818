#include "bdris/aux_phase_solver.hpp"

namespace bdris {

AuxPhases optimal_aux_phases(const ChannelSet& ch, const CMatrix& theta, const CMatrix& w) {
  const int k_users = ch.num_users();
  if (w.cols() != k_users || w.rows() != ch.num_antennas())
    throw Error(ErrorCode::DimensionMismatch, "W must be M x K");
  const CMatrix composite = theta * ch.bs_ris * w;
  const CMatrix hw = ch.user_matrix().adjoint() * composite;
  const Eigen::RowVectorXcd sense = ch.target.adjoint() * composite;

  AuxPhases aux{RMatrix(k_users, k_users), RVector(k_users)};
  for (int k = 0; k < k_users; ++k) {
    for (int i = 0; i < k_users; ++i) aux.theta(i, k) = optimal_phase(hw(i, k));
    aux.phi(k) = optimal_phase(sense(k));
  }
  return aux;
}

}  // namespace bdris
