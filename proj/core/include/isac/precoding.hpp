#pragma once

#include <vector>

#include "isac/config.hpp"
#include "isac/linalg.hpp"

namespace isac {

/// Columns: eigenvectors of the M_UE largest eigenvalues of c_tx^T. With
/// vec(H) ~ CN(0, c_tx (x) c_rx) these maximise E||H u||^2 = u^T c_tx conj(u).
CMatrix pilot_precoder(const CMatrix& c_tx, int ue_antennas, const LinalgTolerances& tol = {});

/// Sum over UE antennas of the M_BS x M_BS sub-blocks of an error
/// covariance in vec(H) order (UE index fastest). For the error matrix E
/// this is E[E^T conj(E)], and its transpose is E[E^H E].
CMatrix ue_block_sum(const CMatrix& xi, int ue_antennas);

/// MMSE precoder for UEs receiving H x: T^-1 [alpha_1 H_1^H, ...] with
/// T = sum_k alpha_k^2 (H_k^H H_k + E[E_k^H E_k]) + noise I, columns scaled
/// to unit norm. `noise` is the receiver noise over the per-stream transmit
/// power. Throws NumericalError on a vanishing column.
CMatrix mmse_precoder(const std::vector<CMatrix>& h_hat, const std::vector<CMatrix>& xi_err,
                      const std::vector<double>& gains, double noise_var);

struct SensingBeam {
  CVector f;  // unit norm, or the raw steering direction when degenerate
  bool degenerate = false;
};

/// (I - H^+ H) a(theta), unit-normalised. An empty `h_stacked` (0 rows)
/// returns the normalised steering vector.
SensingBeam sensing_precoder(const CMatrix& h_stacked, double theta, Eigen::Index antennas,
                             double rel_cutoff = 1e-10);
SensingBeam sensing_precoder_with_projector(const CMatrix& projector, double theta);

/// Sweep directions for slots 0..count-1, uniform in sin(theta) (or in
/// theta) over [start, end].
std::vector<double> beamsweep_angles(double start, double end, int count, bool uniform_in_sine = true);

struct PowerAllocation {
  double comm_per_element = 0.0;     // rho for each communication stream and subcarrier
  double sensing_per_element = 0.0;  // rho for the sensing stream and subcarrier
  double comm_total = 0.0;
  double sensing_total = 0.0;
  RVector amplitudes;                // sqrt(rho) per stream, sensing last
};

PowerAllocation allocate_powers(const ScenarioConfig& cfg);

/// alpha^2 P_comm Tr(C_k) / sigma_k^2 in dB.
double ue_snr_db(const ScenarioConfig& cfg, double covariance_trace = 1.0);

}  // namespace isac
