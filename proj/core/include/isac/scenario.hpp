#pragma once

#include <vector>

#include "isac/config.hpp"
#include "isac/covariance.hpp"
#include "isac/linalg.hpp"
#include "isac/random.hpp"
#include "isac/tensor.hpp"

namespace isac {

/// ULA steering vector with centred element indices -m/2 .. m/2-1:
/// a_n = exp(-j pi n sin(theta)).
CVector steering_angle(double theta, Eigen::Index m);
/// Slow-time steering b_i = exp(-j 2 pi f T i), i = 0..slots-1.
CVector steering_doppler(double doppler, Eigen::Index slots, double t_sym);
/// Fast-time steering d_v = exp(j 2 pi df tau v), v = 0..subcarriers-1.
CVector steering_delay(double delay, Eigen::Index subcarriers, double subcarrier_spacing);

struct Target {
  double theta = 0.0;    // rad
  double range = 0.0;    // m
  double delay = 0.0;    // two-way, s
  double doppler = 0.0;  // Hz
  double velocity = 0.0; // m/s
  cd gain{0.0, 0.0};
};
using TargetSet = std::vector<Target>;

/// Radar-equation amplitude with isotropic elements and the two-way carrier phase.
cd target_gain(double range, double rcs, double carrier);

TargetSet make_targets(const ScenarioConfig& cfg);

/// Sum over targets of gain * exp(-j2pi fD T i) exp(j2pi df v tau) a a^H.
CMatrix sensing_channel(Eigen::Index slot, Eigen::Index subcarrier, const TargetSet& targets, const ScenarioConfig& cfg);

/// Joint draw of the vectorised UE channel at the requested slots.
struct UEChannelSeries {
  CMatrix h;               // (M_BS * M_UE) x slots.size()
  std::vector<int> slots;
  bool ridge_applied = false;

  /// Channel matrix H (M_UE x M_BS) of column n.
  [[nodiscard]] CMatrix matrix(Eigen::Index n, Eigen::Index ue_antennas) const;
};

/// Exact sampler for covariance kron(Toeplitz-in-time, c_k) with temporal
/// correlation zeta(|s_a - s_b|) supplied as a function of the lag.
template <typename Zeta>
UEChannelSeries sample_channel_series(const CMatrix& c_k, const std::vector<int>& slots, Zeta&& zeta, Rng& rng);

UEChannelSeries sample_ue_channel_series(const ScenarioConfig& cfg, const CMatrix& c_k, const std::vector<int>& slots,
                                         Rng& rng);

/// Pilot matrix of UE k: rows k*S .. k*S+S-1 of the unnormalised tau_p-point
/// DFT matrix, so that P_k P_k'^H = tau_p I when k == k' and 0 otherwise.
CMatrix pilot_matrix(int ue, int streams, int pilot_len);

/// Y = gain * H * FP * pilots + N, noise entries CN(0, noise_var).
CMatrix received_pilot(double gain, const CMatrix& h, const CMatrix& fp, const CMatrix& pilots, double noise_var,
                       Rng& rng);

/// Whether slot i carries pilots (i = 0 mod (frame_size + 1)).
inline bool is_pilot_slot(int slot, int frame_size) { return slot % (frame_size + 1) == 0; }

/// Coherence block of a subcarrier.
inline int block_of(int subcarrier, int coherent_subcarriers) { return subcarrier / coherent_subcarriers; }
inline int block_count(int subcarriers, int coherent_subcarriers) {
  return (subcarriers + coherent_subcarriers - 1) / coherent_subcarriers;
}

/// Unit-norm precoders F (M_BS x S) for every (slot, block) plus the
/// per-stream amplitudes sqrt(rho) shared by all resource elements.
struct PrecoderSchedule {
  int slots = 0;
  int blocks = 0;
  int coherent_subcarriers = 1;
  std::vector<CMatrix> f;  // index slot * blocks + block
  RVector amplitudes;      // length S

  [[nodiscard]] const CMatrix& at(int slot, int subcarrier) const {
    return f[static_cast<std::size_t>(slot * blocks + block_of(subcarrier, coherent_subcarriers))];
  }
};

/// Symbol cube X (S x I x V). Data symbols are CN(0,1); at pilot slots the
/// first tau_p subcarriers of every block carry the summed pilot columns.
Tensor3 symbol_cube(const ScenarioConfig& cfg, Rng& rng);

struct RadarCubeParts {
  bool targets = true;
  bool clutter = true;
  bool noise = true;
};

/// Y[:, i, v] = G_{i,v} F_{i,v} P x_{i,v} + c_{i,v} + n_{i,v}.
Tensor3 received_radar_cube(const ScenarioConfig& cfg, const TargetSet& targets, const PrecoderSchedule& schedule,
                            const Tensor3& symbols, const ClutterSampler* clutter, Rng& rng,
                            const RadarCubeParts& parts = {});

// ---------------------------------------------------------------------------

UEChannelSeries sample_channel_series_impl(const CMatrix& c_k, const std::vector<int>& slots, const RMatrix& temporal,
                                           Rng& rng);

template <typename Zeta>
UEChannelSeries sample_channel_series(const CMatrix& c_k, const std::vector<int>& slots, Zeta&& zeta, Rng& rng) {
  const auto n = static_cast<Eigen::Index>(slots.size());
  RMatrix temporal(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      temporal(a, b) = zeta(std::abs(slots[static_cast<std::size_t>(a)] - slots[static_cast<std::size_t>(b)]));
    }
  }
  return sample_channel_series_impl(c_k, slots, temporal, rng);
}

}  // namespace isac
