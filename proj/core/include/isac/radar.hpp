#pragma once

#include <functional>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/covariance.hpp"
#include "isac/linalg.hpp"
#include "isac/tensor.hpp"

namespace isac {

// ---- sample covariances -------------------------------------------------

/// U_1(Y) U_1(Y)^H / (I V) - noise I.
CMatrix sample_cov_space(const Tensor3& y, double noise_var);
/// U_2(Y) U_2(Y)^H / (M V) - noise I.
CMatrix sample_cov_time(const Tensor3& y, double noise_var);
/// U_3(Y) U_3(Y)^H / (M I) - noise I.
CMatrix sample_cov_freq(const Tensor3& y, double noise_var);

// ---- MUSIC --------------------------------------------------------------

using SteeringFn = std::function<CVector(double)>;

struct PseudoSpectrum {
  RVector grid;
  RVector values;
  int subspace_dim = 0;
};

/// Noise-subspace projector of a covariance and the steering model it is
/// searched with. evaluate(x) = 1 / ||Gamma^H s(x)||^2.
class MusicSearch {
 public:
  MusicSearch(const CMatrix& cov, SteeringFn steering, int signal_dim, const LinalgTolerances& tol = {});

  [[nodiscard]] double evaluate(double x) const;
  [[nodiscard]] PseudoSpectrum spectrum(const RVector& grid) const;
  [[nodiscard]] int signal_dim() const { return signal_dim_; }

 private:
  CMatrix noise_basis_;  // dim x (dim - signal_dim)
  SteeringFn steering_;
  int signal_dim_;
};

PseudoSpectrum music_spectrum(const CMatrix& cov, const SteeringFn& steering, int signal_dim, const RVector& grid,
                              const LinalgTolerances& tol = {});

/// Search grids. Angle: `n` points uniform in sin(theta) over (-1, 1).
/// Doppler: [-1/2T, 1/2T). Range: [0, c / (2 df)).
RVector angle_search_grid(int n);
RVector doppler_search_grid(int n, double t_sym);
RVector range_search_grid(int n, double subcarrier_spacing);

struct PeakOptions {
  double threshold_db = 6.0;  // above the median of the spectrum
  int min_separation = 1;     // grid cells between accepted peaks, exclusive
  bool circular = false;      // grid wraps around (Doppler, range)
  double lower = -1e300;      // refinement brackets are clamped to [lower, upper]
  double upper = 1e300;
};

/// Indices of up to `count` local maxima above median + threshold,
/// strongest first.
std::vector<int> find_peaks(const RVector& values, int count, const PeakOptions& opt);

struct PeakSet {
  std::vector<double> params;  // refined peak positions
  int found = 0;
  bool under_resolved = false;
};

/// Picks peaks on the spectrum grid and refines each by golden-section
/// search of the continuous pseudospectrum within one cell on either side.
PeakSet pick_and_refine(const MusicSearch& search, const PseudoSpectrum& spec, int count, const PeakOptions& opt);

// ---- clutter covariance estimation --------------------------------------

struct ClutterEstimate {
  CMatrix b_sp;
  CMatrix b_t;
  CMatrix b_f;  // coherent (diffuse-unaware) reconstruction
  PeakSet angles;
  PeakSet dopplers;
  PeakSet ranges;
  PseudoSpectrum spatial_spectrum;
  PseudoSpectrum doppler_spectrum;
  PseudoSpectrum range_spectrum;
  bool dominance_warning = false;

  [[nodiscard]] bool under_resolved() const {
    return angles.under_resolved || dopplers.under_resolved || ranges.under_resolved;
  }
};

/// Three sample covariances, three MUSIC searches with signal dimension N,
/// and closed-form reconstruction from the refined peaks and the known
/// spreads.
ClutterEstimate estimate_clutter_covariances(const Tensor3& y, const ScenarioConfig& cfg);

/// Same as above from noise-corrected sample covariances, e.g. averaged
/// over several cubes.
ClutterEstimate estimate_clutter_from_covariances(const CMatrix& r_sp, const CMatrix& r_t, const CMatrix& r_f,
                                                  const ScenarioConfig& cfg);

/// Warns (and returns true) when the clutter texture is not at least
/// `margin_db` above the strongest target power.
bool clutter_dominance_warning(const ScenarioConfig& cfg, double margin_db = 10.0);

// ---- whitening and matched filter ---------------------------------------

struct Whitener {
  CMatrix time;  // I x I
  CMatrix freq;  // V x V
};

/// Inverse square roots of the per-axis clutter-plus-noise covariances.
/// W_t = (texture s_sp c_f B_t + noise n_f I)^-1/2 and W_f likewise with
/// (c_t, n_t), where c_x = tr(W_x B_x W_x^H)/N_x and n_x = tr(W_x W_x^H)/N_x
/// are what the other axis passes on; the pair is solved as a fixed point so
/// that the expected time and frequency covariances of the whitened cube are
/// both identities. s_sp is the mean diagonal of B_sp.
Whitener make_whitener(const CMatrix& b_sp, const CMatrix& b_t, const CMatrix& b_f, double texture, double noise_var,
                       const LinalgTolerances& tol = {});

/// Y'' = Y x_2 W_t x_3 W_f. The spatial axis is left untouched.
Tensor3 whiten_cube(const Tensor3& y, const Whitener& w);

struct MatchedFilterOutput {
  std::vector<Tensor3> phi;  // one M x I x V cube per stream
  int gaps = 0;              // cells skipped because the symbol vector vanished
};

/// Per resource element Phi = y x^H / ||x||^2 for the requested streams
/// (all streams when `streams` is empty).
MatchedFilterOutput matched_filter(const Tensor3& y, const Tensor3& x, const std::vector<int>& streams = {});

// ---- range, angle and velocity profiles ---------------------------------

/// DFT over subcarriers with zero padding: r[:, i, v'] = sum_v exp(-j2pi v v'/V') phi[:, i, v].
Tensor3 range_profiles(const Tensor3& phi, int padded);

struct RangeAngleMap {
  RMatrix values;                  // V' x angle grid, MUSIC pseudospectrum per range bin
  std::vector<double> peak_angle;  // theta^M per range bin, refined off the grid
};

/// Per range bin: Q = (1/I) sum_i r r^H and its MUSIC pseudospectrum on the
/// grid. Cells at local maxima store the refined peak value within one cell,
/// so sharp peaks between grid points are not lost to scalloping.
RangeAngleMap range_angle_map(const Tensor3& profiles, const RVector& angle_grid, int signal_dim,
                              const LinalgTolerances& tol = {});

/// |sum_i exp(j2pi i i'/I') a(theta^M_v')^H r[:, i, v']|, rows reordered so
/// that velocity increases from -lambda/(4T) to lambda/(4T).
RMatrix range_velocity_map(const Tensor3& profiles, const std::vector<double>& peak_angle, int padded_slots);

/// Fractional index of the centre of the lobe holding profile[peak]: the
/// midpoint of the contiguous run of samples within `drop_db` (amplitude)
/// of the peak. A swept beam lights each target for a few slots only, so
/// its Doppler lobe is flat-topped and the argmax alone wanders across it.
double lobe_centre(const RVector& profile, Eigen::Index peak, double drop_db = 3.0);

struct PostprocessRecord {
  double sv_fraction = 0.0;
  double kaiser_beta = 0.0;     // 0: no window
  bool range_along_rows = true; // RA maps index range by row, RV maps by column
};

/// Subtracts sv_fraction * s1 u1 v1^T, floors at zero, then optionally
/// tapers the range axis with a Kaiser window.
RMatrix postprocess_map(const RMatrix& map, const PostprocessRecord& rec);

/// Real Kaiser window of length n and shape beta.
RVector kaiser_window(int n, double beta);

struct MapAxes {
  RVector range;     // m, one per range bin
  RVector angle;     // rad
  RVector velocity;  // m/s, increasing
  double range_step = 0.0;
  double velocity_step = 0.0;
};

MapAxes map_axes(const ScenarioConfig& cfg, const RVector& angle_grid);

struct RadarMaps {
  int stream = 0;
  MapAxes axes;
  RangeAngleMap ra;
  RMatrix rv;
  RMatrix ra_post;
  RMatrix rv_post;
  PostprocessRecord record;
};

struct PipelineResult {
  ClutterEstimate estimate;
  WhiteningMode mode = WhiteningMode::estimated;
  std::vector<RadarMaps> maps;
  int gaps = 0;
};

/// Full chain: clutter estimation, whitening of Y and X (per mode), matched
/// filtering, range profiles and RA/RV maps for the requested streams.
/// `truth` is only read in WhiteningMode::truth. `estimation_cube` (if not
/// null) replaces Y for the covariance estimation step.
PipelineResult run_radar_pipeline(const Tensor3& y, const Tensor3& x, const ScenarioConfig& cfg, WhiteningMode mode,
                                  const CovarianceModel& truth, const std::vector<int>& streams,
                                  const Tensor3* estimation_cube = nullptr);

}  // namespace isac
