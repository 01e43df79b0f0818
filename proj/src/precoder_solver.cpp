#include "bdris/precoder_solver.hpp"

#include <cmath>

namespace bdris {

namespace {

constexpr int kMaxBisection = 200;
constexpr double kLambdaRelTol = 1e-10;

/// Hermitian eigenbasis of A, shared by every solve along the lambda path.
struct SpectralSystem {
  RVector eigenvalues;  // clamped to >= 0
  CMatrix rotated_b;    // U^H B

  explicit SpectralSystem(const PrecoderQuadratic& q) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(q.a);
    basis = eig.eigenvectors();
    eigenvalues = eig.eigenvalues().cwiseMax(0.0);
    rotated_b = basis.adjoint() * q.b;
  }

  double power(double shift) const {
    double total = 0.0;
    for (Eigen::Index m = 0; m < eigenvalues.size(); ++m)
      total += rotated_b.row(m).squaredNorm() / std::pow(eigenvalues(m) + shift, 2);
    return total;
  }

  CMatrix solve(double shift) const {
    const RVector inv = (eigenvalues.array() + shift).inverse().matrix();
    return basis * (inv.cast<Complex>().asDiagonal() * rotated_b);
  }

  CMatrix basis;
};

}  // namespace

double PrecoderQuadratic::evaluate(const CMatrix& w) const {
  return (w.adjoint() * a * w).trace().real() - 2.0 * (b.adjoint() * w).trace().real();
}

PrecoderQuadratic assemble_precoder_quadratic(const ChannelSet& ch, const CMatrix& theta,
                                              const AuxPhases& aux, const GainTargets& targets) {
  const int n = ch.num_elements();
  const int k_users = ch.num_users();
  if (theta.rows() != n || theta.cols() != n)
    throw Error(ErrorCode::DimensionMismatch, "Theta must be N x N");
  if (aux.theta.rows() != k_users || aux.phi.size() != k_users)
    throw Error(ErrorCode::DimensionMismatch, "aux phase dimensions");

  // Columns G^H Theta^H f_i and G^H Theta^H f_t.
  const CMatrix cascade = ch.bs_ris.adjoint() * theta.adjoint();
  const CMatrix user_dirs = cascade * ch.user_matrix();
  const CVector target_dir = cascade * ch.target;

  PrecoderQuadratic q;
  q.a = targets.eta * (user_dirs * user_dirs.adjoint()) +
        (1.0 - targets.eta) * (target_dir * target_dir.adjoint());
  q.a = 0.5 * (q.a + q.a.adjoint()).eval();

  q.b.resize(ch.num_antennas(), k_users);
  for (int k = 0; k < k_users; ++k)
    q.b.col(k) = targets.eta * std::polar(targets.c, aux.theta(k, k)) * user_dirs.col(k) +
                 (1.0 - targets.eta) * std::polar(targets.p_t, aux.phi(k)) * target_dir;
  return q;
}

PrecoderSolution solve_precoders(const PrecoderQuadratic& quad, double p_max) {
  if (!(p_max > 0.0)) throw Error(ErrorCode::ValidationError, "p_max must be > 0");
  if (quad.a.rows() != quad.a.cols() || quad.a.rows() != quad.b.rows())
    throw Error(ErrorCode::DimensionMismatch, "A must be M x M and b_k length M");

  PrecoderSolution out;
  const auto m = quad.a.rows();
  if (quad.b.squaredNorm() == 0.0) {
    out.precoder.w = CMatrix::Zero(m, quad.b.cols());
    return out;
  }

  const SpectralSystem sys(quad);

  // Unconstrained branch, ridged when A is numerically singular.
  const double max_ev = sys.eigenvalues.maxCoeff();
  double ridge = 0.0;
  if (sys.eigenvalues.minCoeff() <= 1e-12 * max_ev) {
    ridge = 1e-12 * quad.a.trace().real() / static_cast<double>(m);
    out.ridge_applied = true;
  }
  if (max_ev > 0.0 && sys.power(ridge) <= p_max) {
    out.precoder.w = sys.solve(ridge);
    return out;
  }
  out.ridge_applied = false;

  double hi = 1.0;
  int steps = 0;
  while (sys.power(hi) > p_max) {
    hi *= 2.0;
    if (++steps > kMaxBisection)
      throw Error(ErrorCode::NonConvergence, "no feasible multiplier bracket");
  }
  double lo = 0.0;
  while (hi - lo > kLambdaRelTol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (sys.power(mid) > p_max)
      lo = mid;
    else
      hi = mid;
    if (++steps > kMaxBisection)
      throw Error(ErrorCode::NonConvergence, "multiplier bisection exceeded iteration budget");
  }
  out.lambda = hi;
  out.bisection_steps = steps;
  out.precoder.w = sys.solve(hi);
  return out;
}

}  // namespace bdris
