#pragma once

#include <vector>

#include "isac/linalg.hpp"

namespace isac {

/// Y P_k^H / sqrt(tau_p).
CMatrix despread(const CMatrix& y, const CMatrix& pilots, int pilot_len);

/// One despread pilot observation and the precoder-with-powers F P used
/// when it was transmitted.
struct PilotObservation {
  CVector y;   // vec of the despread block, S * M_UE (may be empty for analysis only)
  CMatrix fp;  // M_BS x S
  int slot = 0;
};

/// Pilot observations ordered newest first: slots iota, iota - (D+1), ...
struct PilotHistory {
  std::vector<PilotObservation> obs;
  int spacing = 1;  // frame_size + 1

  [[nodiscard]] int count() const { return static_cast<int>(obs.size()); }
  [[nodiscard]] CVector stacked() const;
  /// Throws std::invalid_argument if slots are not spaced `spacing` apart.
  void validate() const;
};

/// blkdiag over observations of (F P)^T (x) I_{M_UE}.
CMatrix build_stacked_operator(const PilotHistory& history, int ue_antennas);

struct EstimatorInputs {
  CMatrix c_k;               // unit-trace channel covariance
  std::vector<double> zeta;  // temporal correlation indexed by lag
  double gain = 1.0;         // path amplitude alpha_k
  int pilot_len = 1;         // tau_p
  double noise_var = 1.0;    // per subcarrier, per UE antenna
  int ue_antennas = 1;
  LinalgTolerances tol;
};

struct ChannelEstimate {
  CVector h_hat;    // empty when the history carried no observations
  CMatrix filter;   // A: maps the stacked observation to h_hat
  CMatrix xi_hat;   // covariance of the estimate
  CMatrix xi_err;   // covariance of the error
  int offset = 0;   // slot distance from the newest pilot
  double nmse = 0.0;
  bool ridge_applied = false;
};

/// Aging-aware LMMSE estimate of the channel `offset` slots after the
/// newest pilot in `history`.
ChannelEstimate mmse_estimate(const PilotHistory& history, const EstimatorInputs& in, int offset);

/// Tr(error covariance) for offsets 0..frame_size.
std::vector<double> nmse_curve(const PilotHistory& history, const EstimatorInputs& in, int frame_size);

}  // namespace isac
