#pragma once

#include <optional>
#include <vector>

#include "bdris/system_model.hpp"

namespace bdris {

/// Quadratic model of the objective in psi = vec(Theta) (column-major):
///   psi^H (P + Q) psi - 2 Re{(p + q)^H psi} + constant.
///
/// P and Q are sums of rank-one outer products, so only their generating
/// vectors are stored:
///   P = eta * sum_{i,k} c_ik c_ik^H,       c_ik = conj(G w_k) (x) f_i
///   Q = (1 - eta) * sum_k s_k s_k^H,       s_k  = conj(G w_k) (x) f_t
/// Column i + K * k of `comm` holds c_ik; column k of `sense` holds s_k.
struct PsiQuadratic {
  int n = 0;
  double eta = 0.0;
  CMatrix comm;   // N^2 x K^2
  CMatrix sense;  // N^2 x K
  CVector p;      // N^2
  CVector q;      // N^2
  double constant = 0.0;

  /// [sqrt(eta) comm, sqrt(1 - eta) sense], so P + Q = V V^H.
  CMatrix factor() const;
  CMatrix dense_p() const;
  CMatrix dense_q() const;
  double trace() const;
  /// psi^H (P + Q) psi - 2 Re{(p + q)^H psi}, without the constant.
  double evaluate(const CVector& psi) const;
};

inline constexpr int kDefaultMaxElements = 64;

PsiQuadratic assemble_psi_quadratic(const ChannelSet& ch, const CMatrix& w, const AuxPhases& aux,
                                    const GainTargets& targets,
                                    int max_elements = kDefaultMaxElements);

/// Column-major vec / mat.
CVector vec(const CMatrix& m);
CMatrix mat(const CVector& v, int n);

/// (P + Q + mu I)^{-1} applied through the Woodbury identity; the r x r core
/// is factored once per penalty value.
class PsiSystem {
 public:
  PsiSystem(const PsiQuadratic& quad, double mu);

  CVector solve(const CVector& rhs) const;
  /// (P + Q + mu I) x
  CVector apply(const CVector& x) const;
  double mu() const { return mu_; }

 private:
  CMatrix factor_;
  Eigen::LLT<CMatrix> core_;
  double mu_;
};

/// psi* = (P + Q + mu I)^{-1} (p + q + mu (vec(Theta) - nu)).
CVector psi_update(const PsiQuadratic& quad, double mu, const CMatrix& theta, const CVector& nu);

/// Nearest symmetric unitary matrix in Frobenius norm.
CMatrix symuni_projection(const CMatrix& theta_hat);
PhaseShift group_projection(const CMatrix& theta_hat, int group_size);
PhaseShift diagonal_projection(const CMatrix& theta_hat);
PhaseShift project(const CMatrix& theta_hat, const Architecture& arch);

/// trace(P + Q) / N^2, or 1 when the quadratic vanishes.
double default_penalty(const PsiQuadratic& quad);

struct SplittingOptions {
  std::optional<double> mu;         // default_penalty() when empty
  std::optional<double> tolerance;  // 1e-6 * sqrt(N) when empty
  int max_iterations = 100;
  std::optional<CVector> initial_dual;
};

struct SplittingResult {
  PhaseShift phase;
  CVector dual;
  bool converged = false;
  int iterations = 0;
  double mu = 0.0;
  std::vector<double> primal_residuals;  // ||psi - vec(Theta)||
  std::vector<double> dual_residuals;    // ||psi^{l+1} - psi^l||
};

/// psi-update, projection of mat(psi + nu), dual ascent; repeated until the
/// primal residual drops below tolerance. The returned phase is always feasible.
SplittingResult splitting_solve(const PsiQuadratic& quad, const Architecture& arch,
                                const PhaseShift& init, const SplittingOptions& opts = {});

}  // namespace bdris
