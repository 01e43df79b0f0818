#include "bdris/channel.hpp"

#include <algorithm>
#include <cmath>

namespace bdris {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::ZeroDistance: return "ZeroDistance";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::NonConvergence: return "NonConvergence";
    case ErrorCode::IndivisibleGroups: return "IndivisibleGroups";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::MemoryGuard: return "MemoryGuard";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

void Geometry::validate() const {
  if (n1 < 1 || n2 < 1) throw Error(ErrorCode::ValidationError, "n1 and n2 must be >= 1");
  if (!(wavelength > 0.0)) throw Error(ErrorCode::ValidationError, "wavelength must be > 0");
  for (const auto& u : user_positions)
    if ((u - ris_position).norm() <= 0.0)
      throw Error(ErrorCode::ZeroDistance, "user located at the RIS position");
}

CMatrix ChannelSet::user_matrix() const {
  CMatrix out(num_elements(), num_users());
  for (int k = 0; k < num_users(); ++k) out.col(k) = users[k];
  return out;
}

std::vector<Vec3> element_positions(int n1, int n2, double wavelength) {
  const int n = n1 * n2;
  std::vector<Vec3> pos;
  pos.reserve(n);
  for (int i = 0; i < n; ++i)
    pos.emplace_back(0.0, (i % n1) * wavelength / 2.0, (i / n1) * wavelength / 2.0);
  return pos;
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = kPi * x;
  return std::sin(px) / px;
}

RMatrix spatial_correlation(int n1, int n2, double wavelength) {
  const auto pos = element_positions(n1, n2, wavelength);
  const int n = static_cast<int>(pos.size());
  RMatrix r(n, n);
  for (int i = 0; i < n; ++i) {
    r(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) {
      const double v = sinc(2.0 * (pos[i] - pos[j]).norm() / wavelength);
      r(i, j) = v;
      r(j, i) = v;
    }
  }
  return r;
}

RMatrix sqrt_psd(const RMatrix& r) {
  if (r.rows() != r.cols()) throw Error(ErrorCode::NonSquare, "sqrt_psd expects a square matrix");
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(r);
  const RVector& ev = eig.eigenvalues();
  const double max_ev = ev.maxCoeff();
  const double min_ev = ev.minCoeff();
  if (min_ev < -1e-8 * std::max(max_ev, 0.0))
    throw Error(ErrorCode::NotPSD, "smallest eigenvalue " + std::to_string(min_ev));
  const RVector root = ev.cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

CVector rayleigh_user_channel(double beta, const RMatrix& sqrt_corr, Rng& rng) {
  const CVector z = cscg_matrix(sqrt_corr.cols(), 1, rng);
  return std::sqrt(beta) * (sqrt_corr.cast<Complex>() * z);
}

CVector target_steering(double elevation, double azimuth, int n1, int n2) {
  const double s1 = std::sin(elevation) * std::sin(azimuth);
  const double s2 = std::cos(elevation);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n1 * n2));
  CVector out(n1 * n2);
  for (int m1 = 0; m1 < n1; ++m1)
    for (int m2 = 0; m2 < n2; ++m2)
      out(m1 * n2 + m2) = std::polar(scale, -kPi * (m1 * s1 + m2 * s2));
  return out;
}

CVector ula_steering(int m, double direction_cosine) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  CVector out(m);
  for (int i = 0; i < m; ++i) out(i) = std::polar(scale, -kPi * i * direction_cosine);
  return out;
}

double pathloss_user(double distance_m) {
  if (!(distance_m > 0.0)) throw Error(ErrorCode::ZeroDistance, "user distance must be > 0");
  return 1e-3 / (distance_m * distance_m);
}

double pathloss_bs_ris_db(double distance_m) {
  if (!(distance_m > 0.0)) throw Error(ErrorCode::ZeroDistance, "BS-RIS distance must be > 0");
  return 37.3 + 22.0 * std::log10(distance_m);
}

SteeringPair bs_ris_steering(const Geometry& geom, int num_antennas, const Vec3& bs_axis) {
  const Vec3 delta = geom.bs_position - geom.ris_position;
  const double dist = delta.norm();
  if (!(dist > 0.0)) throw Error(ErrorCode::ZeroDistance, "BS and RIS coincide");
  const Vec3 to_bs = delta / dist;
  const double elevation = std::acos(std::clamp(to_bs.z(), -1.0, 1.0));
  const double azimuth = std::atan2(to_bs.y(), to_bs.x());
  return {target_steering(elevation, azimuth, geom.n1, geom.n2),
          ula_steering(num_antennas, (-to_bs).dot(bs_axis.normalized()))};
}

CMatrix bs_ris_channel(double distance_m, double rician_kappa, const SteeringPair& steering,
                       Rng& rng) {
  const double pl_db = pathloss_bs_ris_db(distance_m);
  if (rician_kappa < 0.0) throw Error(ErrorCode::ValidationError, "rician_kappa must be >= 0");
  const auto n = steering.ris.size();
  const auto m = steering.bs.size();
  const double amplitude = std::sqrt(std::pow(10.0, -pl_db / 10.0));

  const bool pure_los = rician_kappa >= 1e12;
  const double los_weight = pure_los ? 1.0 : std::sqrt(rician_kappa / (1.0 + rician_kappa));
  const double nlos_weight = pure_los ? 0.0 : std::sqrt(1.0 / (1.0 + rician_kappa));

  const CMatrix los =
      std::sqrt(static_cast<double>(n * m)) * steering.ris * steering.bs.adjoint();
  // Always consume the scatter draws so the rng stream does not depend on kappa.
  const CMatrix scatter = cscg_matrix(n, m, rng);
  return amplitude * (los_weight * los + nlos_weight * scatter);
}

std::vector<Vec3> drop_users(int num_users, const Vec3& center, double r_min, double r_max,
                             Rng& rng) {
  std::uniform_real_distribution<double> area(r_min * r_min, r_max * r_max);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  std::vector<Vec3> out;
  out.reserve(num_users);
  for (int k = 0; k < num_users; ++k) {
    const double r = std::sqrt(area(rng));
    const double a = angle(rng);
    out.emplace_back(center.x() + r * std::cos(a), center.y() + r * std::sin(a), 0.0);
  }
  return out;
}

ChannelSet generate_channels(Geometry& geom, const ScenarioParams& params, Rng& rng) {
  geom.user_positions =
      drop_users(params.num_users, geom.ris_position, params.user_radius_min,
                 params.user_radius_max, rng);
  geom.validate();

  ChannelSet ch;
  const auto steering = bs_ris_steering(geom, params.num_antennas);
  ch.bs_ris = bs_ris_channel((geom.bs_position - geom.ris_position).norm(),
                             params.rician_kappa, steering, rng);

  const RMatrix root = sqrt_psd(spatial_correlation(geom.n1, geom.n2, geom.wavelength));
  for (const auto& u : geom.user_positions) {
    const double beta = pathloss_user((u - geom.ris_position).norm());
    ch.betas.push_back(beta);
    ch.users.push_back(rayleigh_user_channel(beta, root, rng));
  }
  ch.target = target_steering(geom.target_elevation, geom.target_azimuth, geom.n1, geom.n2);
  return ch;
}

}  // namespace bdris
