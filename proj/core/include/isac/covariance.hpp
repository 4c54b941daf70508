#pragma once

#include <cstdint>
#include <vector>

#include "isac/linalg.hpp"
#include "isac/random.hpp"
#include "isac/tensor.hpp"

namespace isac {

/// A set of scatterer groups (UE clusters or clutter patches) described by
/// median angle and, for clutter, median Doppler and range. Spreads are
/// shared by all members.
struct ClusterSet {
  std::vector<double> angles;    // rad, |angle| < pi/2
  double angular_spread = 0.0;   // rad
  std::vector<double> dopplers;  // Hz, empty or same length as angles
  std::vector<double> ranges;    // m, empty or same length as angles
  double delay_spread = 0.0;     // s
  double coherent_symbols = 1.0; // slots over which the clutter stays correlated

  [[nodiscard]] std::size_t size() const { return angles.size(); }
  /// Throws std::invalid_argument on a violated invariant.
  void validate() const;
};

/// Diffuse (multipath) part of the clutter power-delay profile.
struct DiffuseFreqParams {
  double decay_base = 0.9;          // in (0, 1)
  double coherence_bandwidth = 5e4; // Hz
  double power_ratio = 1.0;         // linear, >= 0

  void validate() const;
};

struct FrequencyCovariance {
  CMatrix coherent;
  CMatrix diffuse;
  [[nodiscard]] CMatrix total() const { return coherent + diffuse; }
};

/// Every second-order object the simulator and the estimators use.
struct CovarianceModel {
  CMatrix c_tx;        // M_BS x M_BS, unit diagonal; correlation of the columns of H
  CMatrix c_rx;        // M_UE x M_UE, unit diagonal
  CMatrix c_k;         // kron(c_tx, c_rx) scaled to unit trace
  std::vector<double> zeta;  // temporal correlation at lags 0..max
  CMatrix b_sp;        // M_BS x M_BS
  CMatrix b_t;         // I x I
  FrequencyCovariance b_f;  // V x V
  double texture = 1.0;     // clutter power, linear

  /// Clutter factors and UE matrices must all be Hermitian PSD.
  void check(const LinalgTolerances& tol = {}) const;
};

/// [C]_{l,m} = (1/N) sum_n exp(-j pi (l-m) sin psi_n) exp(-(pi^2/2) ((l-m) cos psi_n spread)^2).
CMatrix spatial_covariance(const ClusterSet& clusters, Eigen::Index antennas);

/// J0(2 pi t_sym f_doppler lag).
double temporal_corr(double lag, double doppler, double t_sym);
std::vector<double> temporal_corr_sequence(std::size_t max_lag, double doppler, double t_sym);

/// Closed-form Doppler covariance of Gaussian-spectrum patches.
CMatrix doppler_covariance(const ClusterSet& clusters, Eigen::Index slots, double t_sym);

/// Spectral spread (Hz) of a patch that stays correlated over `coherent_symbols` slots.
double doppler_spread(double coherent_symbols, double t_sym);

FrequencyCovariance frequency_covariance(const ClusterSet& clusters, const DiffuseFreqParams& diffuse,
                                         Eigen::Index subcarriers, double subcarrier_spacing);

/// Unit-trace Kronecker UE covariance kron(c_tx, c_rx) / trace.
CMatrix ue_covariance(const CMatrix& c_tx, const CMatrix& c_rx);

/// Draws clutter cubes c with E[vec(c) vec(c)^H] = texture * (B_f (x) B_t (x) B_sp)
/// in the library's column-major vec order. The factor square roots are
/// computed once; the full covariance is never formed.
class ClutterSampler {
 public:
  ClutterSampler(const CMatrix& b_sp, const CMatrix& b_t, const CMatrix& b_f, double texture,
                 const LinalgTolerances& tol = {});
  explicit ClutterSampler(const CovarianceModel& model, const LinalgTolerances& tol = {});

  [[nodiscard]] Tensor3 draw(Rng& rng) const;
  [[nodiscard]] Tensor3::Dims dims() const { return {root_sp_.rows(), root_t_.rows(), root_f_.rows()}; }

 private:
  CMatrix root_sp_;
  CMatrix root_t_;
  CMatrix root_f_;
  double amplitude_;
};

Tensor3 sample_separable_clutter(const CovarianceModel& model, const Tensor3::Dims& dims, Rng& rng);

}  // namespace isac
