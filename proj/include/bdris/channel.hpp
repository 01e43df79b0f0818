#pragma once

#include <vector>

#include "bdris/common.hpp"

namespace bdris {

/// Scenario geometry. The RIS lies in the local y-z plane; element i sits at
/// (0, mod(i, n1), floor(i / n1)) * wavelength / 2 (zero-based i).
struct Geometry {
  Vec3 bs_position{-20.0, 0.0, 25.0};
  Vec3 ris_position{0.0, 0.0, 0.0};
  std::vector<Vec3> user_positions;
  double target_elevation = kPi / 2.0;
  double target_azimuth = kPi / 4.0;
  double wavelength = 0.03;
  int n1 = 8;
  int n2 = 4;

  int num_elements() const { return n1 * n2; }
  void validate() const;
};

/// One realization of every link.
struct ChannelSet {
  CMatrix bs_ris;                 // G, N x M
  std::vector<CVector> users;     // f_k, K vectors of length N
  CVector target;                 // f_t, length N, unit norm
  std::vector<double> betas;      // per-user path loss, linear

  int num_elements() const { return static_cast<int>(bs_ris.rows()); }
  int num_antennas() const { return static_cast<int>(bs_ris.cols()); }
  int num_users() const { return static_cast<int>(users.size()); }
  /// Columns are f_1 .. f_K.
  CMatrix user_matrix() const;
};

std::vector<Vec3> element_positions(int n1, int n2, double wavelength);

/// Normalized sinc: sin(pi x) / (pi x), sinc(0) = 1.
double sinc(double x);

RMatrix spatial_correlation(int n1, int n2, double wavelength);

/// Symmetric PSD square root through the eigendecomposition. Throws NotPSD
/// when the smallest eigenvalue is below -1e-8 times the largest.
RMatrix sqrt_psd(const RMatrix& r);

CVector rayleigh_user_channel(double beta, const RMatrix& sqrt_corr, Rng& rng);

/// Planar-array response for elevation/azimuth (radians), unit norm.
CVector target_steering(double elevation, double azimuth, int n1, int n2);

/// Uniform linear array response with half-wavelength spacing, unit norm.
/// `direction_cosine` is the cosine between the array axis and the ray.
CVector ula_steering(int m, double direction_cosine);

/// beta = 1e-3 * d^-2.
double pathloss_user(double distance_m);

/// Large-scale BS-RIS loss in dB: 37.3 + 22 log10(d).
double pathloss_bs_ris_db(double distance_m);

/// Unit-norm array responses of the BS-RIS line-of-sight path.
struct SteeringPair {
  CVector ris;  // N
  CVector bs;   // M
};

/// Array responses derived from positions. The BS ULA lies along `bs_axis`.
SteeringPair bs_ris_steering(const Geometry& geom, int num_antennas,
                             const Vec3& bs_axis = Vec3::UnitY());

/// Rician BS-RIS channel. Kappa is linear; values >= 1e12 are treated as
/// pure line of sight.
CMatrix bs_ris_channel(double distance_m, double rician_kappa, const SteeringPair& steering,
                       Rng& rng);

struct ScenarioParams {
  int num_antennas = 8;
  int num_users = 5;
  double rician_kappa = 10.0;
  double user_radius_min = 5.0;
  double user_radius_max = 30.0;
};

/// Users dropped uniformly (by area) in an annulus around the RIS at z = 0.
std::vector<Vec3> drop_users(int num_users, const Vec3& center, double r_min, double r_max,
                             Rng& rng);

/// Fills geom.user_positions and draws every channel from `rng`.
ChannelSet generate_channels(Geometry& geom, const ScenarioParams& params, Rng& rng);

}  // namespace bdris
