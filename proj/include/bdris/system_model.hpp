#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bdris/channel.hpp"

namespace bdris {

enum class ArchitectureKind { FullyConnected, GroupConnected, Diagonal };

/// RIS circuit topology; the feasible set of the scattering matrix.
struct Architecture {
  ArchitectureKind kind = ArchitectureKind::FullyConnected;
  int group_size = 0;  // only meaningful for GroupConnected

  static Architecture fully_connected() { return {ArchitectureKind::FullyConnected, 0}; }
  static Architecture group_connected(int l) { return {ArchitectureKind::GroupConnected, l}; }
  static Architecture diagonal() { return {ArchitectureKind::Diagonal, 0}; }

  /// "fbd", "gbd" or "dris".
  std::string short_name() const;
  static Architecture parse(const std::string& name, int group_size);

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

struct PhaseShift {
  CMatrix theta;
  Architecture arch;

  int size() const { return static_cast<int>(theta.rows()); }
};

struct Precoder {
  CMatrix w;  // M x K, column k serves user k

  double total_power() const { return w.squaredNorm(); }
};

struct AuxPhases {
  RMatrix theta;  // K x K, theta(i, k) pairs user i with precoder k
  RVector phi;    // K
};

struct GainTargets {
  double c = 0.0;         // desired diagonal amplitude
  double p_t = 0.0;       // desired per-stream sensing amplitude
  double eta = 0.5;

  void validate() const;
};

struct FeasibilityResiduals {
  double unitarity = 0.0;     // ||T^H T - I||_F
  double symmetry = 0.0;      // ||T - T^T||_F
  double off_structure = 0.0; // max |entry| outside the allowed pattern
  double modulus = 0.0;       // max | |T_nn| - 1 |, diagonal architecture only
};

FeasibilityResiduals feasibility_residuals(const PhaseShift& ps);

/// Applies the per-architecture tolerances to feasibility_residuals().
bool is_feasible(const PhaseShift& ps);

/// Row k is f_k^H Theta G.
CMatrix effective_channels(const ChannelSet& ch, const CMatrix& theta);

/// F(i, k) = |[H W](i, k)|^2.
RMatrix beam_gain_matrix(const CMatrix& h, const CMatrix& w);

double sensing_gain(const CVector& f_t, const CMatrix& theta, const CMatrix& g, const CMatrix& w);

/// Weighted gain-matching objective over (W, Theta, aux).
double objective(const CMatrix& w, const CMatrix& theta, const AuxPhases& aux,
                 const GainTargets& targets, const ChannelSet& ch);

struct RateResult {
  std::vector<double> sinr;
  double sum_rate = 0.0;  // bit/s/Hz
};

/// SINR_k = F(k,k) / (sum_{i != k} F(k, i) + noise_k).
RateResult sinr_and_rate(const RMatrix& f, const std::vector<double>& noise_powers);

struct PatternPoint {
  double azimuth = 0.0;
  double gain = 0.0;
};

std::vector<PatternPoint> beampattern(const CMatrix& theta, const CMatrix& g, const CMatrix& w,
                                      double elevation, const std::vector<double>& azimuths,
                                      int n1, int n2);

}  // namespace bdris
