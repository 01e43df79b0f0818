#include "bdris/phase_solver.hpp"

#include <cmath>
#include <limits>

namespace bdris {

CVector vec(const CMatrix& m) { return m.reshaped(); }

CMatrix mat(const CVector& v, int n) { return v.reshaped(n, n); }

CMatrix PsiQuadratic::factor() const {
  CMatrix v(comm.rows(), comm.cols() + sense.cols());
  v << std::sqrt(eta) * comm, std::sqrt(1.0 - eta) * sense;
  return v;
}

CMatrix PsiQuadratic::dense_p() const { return eta * (comm * comm.adjoint()); }

CMatrix PsiQuadratic::dense_q() const { return (1.0 - eta) * (sense * sense.adjoint()); }

double PsiQuadratic::trace() const {
  return eta * comm.squaredNorm() + (1.0 - eta) * sense.squaredNorm();
}

double PsiQuadratic::evaluate(const CVector& psi) const {
  const double quad_form = eta * (comm.adjoint() * psi).squaredNorm() +
                           (1.0 - eta) * (sense.adjoint() * psi).squaredNorm();
  return quad_form - 2.0 * (p + q).dot(psi).real();
}

PsiQuadratic assemble_psi_quadratic(const ChannelSet& ch, const CMatrix& w, const AuxPhases& aux,
                                    const GainTargets& targets, int max_elements) {
  const int n = ch.num_elements();
  const int k_users = ch.num_users();
  if (n > max_elements)
    throw Error(ErrorCode::MemoryGuard, "N = " + std::to_string(n) + " exceeds the cap of " +
                                            std::to_string(max_elements) + " elements");
  if (w.rows() != ch.num_antennas() || w.cols() != k_users)
    throw Error(ErrorCode::DimensionMismatch, "W must be M x K");
  if (aux.theta.rows() != k_users || aux.theta.cols() != k_users || aux.phi.size() != k_users)
    throw Error(ErrorCode::DimensionMismatch, "aux phase dimensions");

  PsiQuadratic quad;
  quad.n = n;
  quad.eta = targets.eta;
  const long n2 = static_cast<long>(n) * n;
  quad.comm.resize(n2, k_users * k_users);
  quad.sense.resize(n2, k_users);
  quad.p = CVector::Zero(n2);
  quad.q = CVector::Zero(n2);

  const CMatrix beams = ch.bs_ris * w;  // column k is G w_k
  for (int k = 0; k < k_users; ++k) {
    const Eigen::RowVectorXcd beam_h = beams.col(k).adjoint();
    for (int i = 0; i < k_users; ++i) {
      // vec(f_i (G w_k)^H) = conj(G w_k) (x) f_i
      quad.comm.col(i + k_users * k) = (ch.users[i] * beam_h).reshaped();
    }
    quad.sense.col(k) = (ch.target * beam_h).reshaped();
    quad.p += targets.eta * std::polar(targets.c, aux.theta(k, k)) * quad.comm.col(k + k_users * k);
    quad.q += (1.0 - targets.eta) * std::polar(targets.p_t, aux.phi(k)) * quad.sense.col(k);
  }
  quad.constant = targets.eta * k_users * targets.c * targets.c +
                  (1.0 - targets.eta) * k_users * targets.p_t * targets.p_t;
  return quad;
}

PsiSystem::PsiSystem(const PsiQuadratic& quad, double mu) : factor_(quad.factor()), mu_(mu) {
  if (!(mu > 0.0)) throw Error(ErrorCode::SingularSystem, "penalty mu must be > 0");
  CMatrix core = factor_.adjoint() * factor_;
  core.diagonal().array() += mu;
  core_.compute(core);
  if (core_.info() != Eigen::Success)
    throw Error(ErrorCode::SingularSystem, "Woodbury core factorization failed");
}

CVector PsiSystem::solve(const CVector& rhs) const {
  if (factor_.cols() == 0) return rhs / mu_;
  const CVector coeff = core_.solve(factor_.adjoint() * rhs);
  return (rhs - factor_ * coeff) / mu_;
}

CVector PsiSystem::apply(const CVector& x) const {
  return factor_ * (factor_.adjoint() * x) + mu_ * x;
}

CVector psi_update(const PsiQuadratic& quad, double mu, const CMatrix& theta, const CVector& nu) {
  const PsiSystem sys(quad, mu);
  const CVector rhs = quad.p + quad.q + mu * (vec(theta) - nu);
  CVector psi = sys.solve(rhs);
  const double residual = (sys.apply(psi) - rhs).norm();
  if (residual > 1e-8 * std::max(rhs.norm(), std::numeric_limits<double>::min()))
    throw Error(ErrorCode::SingularSystem, "psi update residual " + std::to_string(residual));
  return psi;
}

CMatrix symuni_projection(const CMatrix& theta_hat) {
  if (theta_hat.rows() != theta_hat.cols())
    throw Error(ErrorCode::NonSquare, "projection input must be square");
  const auto n = theta_hat.rows();
  const CMatrix sym = 0.5 * (theta_hat + theta_hat.transpose());
  Eigen::BDCSVD<CMatrix> svd(sym, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cutoff = 1e-10 * sv(0);
  Eigen::Index rank = 0;
  while (rank < n && sv(rank) > cutoff) ++rank;

  const CMatrix& v = svd.matrixV();
  CMatrix u_tilde(n, n);
  u_tilde.leftCols(rank) = svd.matrixU().leftCols(rank);
  u_tilde.rightCols(n - rank) = v.rightCols(n - rank).conjugate();
  const CMatrix out = u_tilde * v.adjoint();
  // Exact symmetry; the antisymmetric part is rounding noise.
  return 0.5 * (out + out.transpose());
}

PhaseShift group_projection(const CMatrix& theta_hat, int group_size) {
  if (theta_hat.rows() != theta_hat.cols())
    throw Error(ErrorCode::NonSquare, "projection input must be square");
  const auto n = theta_hat.rows();
  if (group_size < 1 || n % group_size != 0)
    throw Error(ErrorCode::IndivisibleGroups, "N = " + std::to_string(n) +
                                                  " is not divisible by group size " +
                                                  std::to_string(group_size));
  PhaseShift out{CMatrix::Zero(n, n), Architecture::group_connected(group_size)};
  for (Eigen::Index start = 0; start < n; start += group_size)
    out.theta.block(start, start, group_size, group_size) =
        symuni_projection(theta_hat.block(start, start, group_size, group_size));
  return out;
}

PhaseShift diagonal_projection(const CMatrix& theta_hat) {
  if (theta_hat.rows() != theta_hat.cols())
    throw Error(ErrorCode::NonSquare, "projection input must be square");
  const auto n = theta_hat.rows();
  PhaseShift out{CMatrix::Zero(n, n), Architecture::diagonal()};
  for (Eigen::Index i = 0; i < n; ++i)
    out.theta(i, i) = std::polar(1.0, wrapped_angle(theta_hat(i, i)));
  return out;
}

PhaseShift project(const CMatrix& theta_hat, const Architecture& arch) {
  switch (arch.kind) {
    case ArchitectureKind::FullyConnected:
      return {symuni_projection(theta_hat), arch};
    case ArchitectureKind::GroupConnected:
      return group_projection(theta_hat, arch.group_size);
    case ArchitectureKind::Diagonal:
      return diagonal_projection(theta_hat);
  }
  throw Error(ErrorCode::ValidationError, "unknown architecture");
}

double default_penalty(const PsiQuadratic& quad) {
  const double mu = quad.trace() / (static_cast<double>(quad.n) * quad.n);
  return mu > 0.0 ? mu : 1.0;
}

SplittingResult splitting_solve(const PsiQuadratic& quad, const Architecture& arch,
                                const PhaseShift& init, const SplittingOptions& opts) {
  const int n = quad.n;
  if (init.size() != n) throw Error(ErrorCode::DimensionMismatch, "initial Theta must be N x N");
  const long n2 = static_cast<long>(n) * n;

  SplittingResult out;
  out.mu = opts.mu.value_or(default_penalty(quad));
  const double tol = opts.tolerance.value_or(1e-6 * std::sqrt(static_cast<double>(n)));
  const PsiSystem sys(quad, out.mu);
  const CVector linear = quad.p + quad.q;

  out.phase = init;
  out.dual = opts.initial_dual.value_or(CVector::Zero(n2));
  if (out.dual.size() != n2) throw Error(ErrorCode::DimensionMismatch, "dual must be N^2 long");
  CVector psi = vec(init.theta);

  for (int it = 0; it < opts.max_iterations; ++it) {
    const CVector next = sys.solve(linear + out.mu * (vec(out.phase.theta) - out.dual));
    out.phase = project(mat(next + out.dual, n), arch);
    const CVector gap = next - vec(out.phase.theta);
    out.dual += gap;

    out.primal_residuals.push_back(gap.norm());
    out.dual_residuals.push_back((next - psi).norm());
    psi = next;
    out.iterations = it + 1;
    if (out.primal_residuals.back() <= tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

}  // namespace bdris
