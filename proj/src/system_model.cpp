#include "bdris/system_model.hpp"

#include <cmath>

namespace bdris {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::DimensionMismatch, what);
}

double off_pattern_max(const PhaseShift& ps) {
  const int n = ps.size();
  double worst = 0.0;
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r) {
      bool allowed = true;
      switch (ps.arch.kind) {
        case ArchitectureKind::FullyConnected: break;
        case ArchitectureKind::GroupConnected:
          allowed = r / ps.arch.group_size == c / ps.arch.group_size;
          break;
        case ArchitectureKind::Diagonal: allowed = r == c; break;
      }
      if (!allowed) worst = std::max(worst, std::abs(ps.theta(r, c)));
    }
  return worst;
}

}  // namespace

std::string Architecture::short_name() const {
  switch (kind) {
    case ArchitectureKind::FullyConnected: return "fbd";
    case ArchitectureKind::GroupConnected: return "gbd";
    case ArchitectureKind::Diagonal: return "dris";
  }
  return "unknown";
}

Architecture Architecture::parse(const std::string& name, int group_size) {
  if (name == "fbd") return fully_connected();
  if (name == "gbd") return group_connected(group_size);
  if (name == "dris") return diagonal();
  throw Error(ErrorCode::ValidationError, "arch: unknown architecture '" + name + "'");
}

void GainTargets::validate() const {
  if (!(eta >= 0.0 && eta <= 1.0)) throw Error(ErrorCode::ValidationError, "eta must be in [0,1]");
  if (c < 0.0 || p_t < 0.0) throw Error(ErrorCode::ValidationError, "gain targets must be >= 0");
}

FeasibilityResiduals feasibility_residuals(const PhaseShift& ps) {
  const int n = ps.size();
  FeasibilityResiduals res;
  res.unitarity = (ps.theta.adjoint() * ps.theta - CMatrix::Identity(n, n)).norm();
  res.symmetry = (ps.theta - ps.theta.transpose()).norm();
  res.off_structure = off_pattern_max(ps);
  if (ps.arch.kind == ArchitectureKind::Diagonal)
    for (int i = 0; i < n; ++i)
      res.modulus = std::max(res.modulus, std::abs(std::abs(ps.theta(i, i)) - 1.0));
  return res;
}

bool is_feasible(const PhaseShift& ps) {
  if (ps.theta.rows() != ps.theta.cols()) return false;
  if (ps.arch.kind == ArchitectureKind::GroupConnected &&
      (ps.arch.group_size < 1 || ps.size() % ps.arch.group_size != 0))
    return false;
  const auto res = feasibility_residuals(ps);
  if (res.off_structure != 0.0) return false;
  if (ps.arch.kind == ArchitectureKind::Diagonal) return res.modulus <= 1e-10;
  return res.unitarity <= 1e-8 && res.symmetry <= 1e-10;
}

CMatrix effective_channels(const ChannelSet& ch, const CMatrix& theta) {
  const int n = ch.num_elements();
  require(theta.rows() == n && theta.cols() == n, "Theta must be N x N");
  for (const auto& f : ch.users) require(f.size() == n, "user channel length must be N");
  return ch.user_matrix().adjoint() * theta * ch.bs_ris;
}

RMatrix beam_gain_matrix(const CMatrix& h, const CMatrix& w) {
  require(h.cols() == w.rows(), "H columns must equal W rows");
  return (h * w).cwiseAbs2();
}

double sensing_gain(const CVector& f_t, const CMatrix& theta, const CMatrix& g,
                    const CMatrix& w) {
  require(theta.rows() == f_t.size() && theta.cols() == g.rows() && g.cols() == w.rows(),
          "sensing_gain dimensions");
  const CVector beam = g * w.rowwise().sum();
  return std::norm(f_t.dot(theta * beam));
}

double objective(const CMatrix& w, const CMatrix& theta, const AuxPhases& aux,
                 const GainTargets& targets, const ChannelSet& ch) {
  const int k_users = ch.num_users();
  require(w.cols() == k_users, "W must have K columns");
  require(w.rows() == ch.num_antennas(), "W must have M rows");
  require(aux.theta.rows() == k_users && aux.theta.cols() == k_users && aux.phi.size() == k_users,
          "aux phase dimensions");
  const CMatrix composite = theta * ch.bs_ris * w;  // N x K
  const CMatrix hw = ch.user_matrix().adjoint() * composite;
  const Eigen::RowVectorXcd sense = ch.target.adjoint() * composite;

  double comm = 0.0;
  for (int k = 0; k < k_users; ++k)
    for (int i = 0; i < k_users; ++i) {
      const double amp = i == k ? targets.c : 0.0;
      comm += std::norm(hw(i, k) - std::polar(amp, aux.theta(i, k)));
    }
  double sense_err = 0.0;
  for (int k = 0; k < k_users; ++k)
    sense_err += std::norm(sense(k) - std::polar(targets.p_t, aux.phi(k)));
  return targets.eta * comm + (1.0 - targets.eta) * sense_err;
}

RateResult sinr_and_rate(const RMatrix& f, const std::vector<double>& noise_powers) {
  const auto k_users = f.rows();
  require(f.cols() == k_users && static_cast<Eigen::Index>(noise_powers.size()) == k_users,
          "F must be K x K with K noise powers");
  RateResult out;
  for (Eigen::Index k = 0; k < k_users; ++k) {
    const double interference = f.row(k).sum() - f(k, k);
    const double sinr = f(k, k) / (interference + noise_powers[k]);
    out.sinr.push_back(sinr);
    out.sum_rate += std::log2(1.0 + sinr);
  }
  return out;
}

std::vector<PatternPoint> beampattern(const CMatrix& theta, const CMatrix& g, const CMatrix& w,
                                      double elevation, const std::vector<double>& azimuths,
                                      int n1, int n2) {
  require(theta.rows() == n1 * n2, "Theta size must equal n1 * n2");
  const CVector beam = theta * (g * w.rowwise().sum());
  std::vector<PatternPoint> out;
  out.reserve(azimuths.size());
  for (double a : azimuths)
    out.push_back({a, std::norm(target_steering(elevation, a, n1, n2).dot(beam))});
  return out;
}

}  // namespace bdris
