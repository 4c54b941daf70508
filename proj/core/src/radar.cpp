#include "isac/radar.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>

#include <spdlog/spdlog.h>
#include <unsupported/Eigen/FFT>

#include "isac/precoding.hpp"
#include "isac/scenario.hpp"

namespace isac {

namespace {

CMatrix sample_cov(const Tensor3& y, int axis, double noise_var) {
  const Eigen::Index n = y.dim(axis);
  const double others = static_cast<double>(y.size()) / static_cast<double>(n);
  CMatrix g = unfolding_gram(y, axis) / others;
  g.diagonal().array() -= noise_var;
  return 0.5 * (g + g.adjoint());
}

double circular_distance(int a, int b, int n, bool circular) {
  const int d = std::abs(a - b);
  return circular ? std::min(d, n - d) : d;
}

// Maximiser of f on [a, b] by golden-section search.
template <typename F>
double golden_max(F&& f, double a, double b, int iterations = 60) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations && (b - a) > 1e-15 * (std::abs(a) + std::abs(b) + 1e-300); ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

}  // namespace

CMatrix sample_cov_space(const Tensor3& y, double noise_var) { return sample_cov(y, 1, noise_var); }
CMatrix sample_cov_time(const Tensor3& y, double noise_var) { return sample_cov(y, 2, noise_var); }
CMatrix sample_cov_freq(const Tensor3& y, double noise_var) { return sample_cov(y, 3, noise_var); }

// ---- MUSIC ------------------------------------------------------------------

MusicSearch::MusicSearch(const CMatrix& cov, SteeringFn steering, int signal_dim, const LinalgTolerances& tol)
    : steering_(std::move(steering)), signal_dim_(signal_dim) {
  const Eigen::Index dim = cov.rows();
  if (signal_dim < 1 || signal_dim >= dim) {
    throw std::invalid_argument("MusicSearch: signal dimension must lie in [1, " + std::to_string(dim - 1) + "]");
  }
  const HermitianEig eig = hermitian_eig(cov, tol);
  noise_basis_ = eig.vectors.rightCols(dim - signal_dim);
}

double MusicSearch::evaluate(double x) const {
  const CVector s = steering_(x);
  const double denom = (noise_basis_.adjoint() * s).squaredNorm();
  return 1.0 / std::max(denom, std::numeric_limits<double>::min());
}

PseudoSpectrum MusicSearch::spectrum(const RVector& grid) const {
  PseudoSpectrum out{grid, RVector(grid.size()), signal_dim_};
  const Eigen::Index dim = noise_basis_.rows();
  constexpr Eigen::Index kChunk = 256;
  for (Eigen::Index start = 0; start < grid.size(); start += kChunk) {
    const Eigen::Index len = std::min(kChunk, grid.size() - start);
    CMatrix steer(dim, len);
    for (Eigen::Index k = 0; k < len; ++k) steer.col(k) = steering_(grid(start + k));
    const RVector denom = (noise_basis_.adjoint() * steer).colwise().squaredNorm().transpose();
    for (Eigen::Index k = 0; k < len; ++k) {
      out.values(start + k) = 1.0 / std::max(denom(k), std::numeric_limits<double>::min());
    }
  }
  return out;
}

PseudoSpectrum music_spectrum(const CMatrix& cov, const SteeringFn& steering, int signal_dim, const RVector& grid,
                              const LinalgTolerances& tol) {
  return MusicSearch(cov, steering, signal_dim, tol).spectrum(grid);
}

RVector angle_search_grid(int n) {
  if (n < 2) throw std::invalid_argument("angle grid needs at least 2 points");
  RVector g(n);
  for (int k = 0; k < n; ++k) g(k) = std::asin(-1.0 + (2.0 * k + 1.0) / n);
  return g;
}

RVector doppler_search_grid(int n, double t_sym) {
  if (n < 2) throw std::invalid_argument("Doppler grid needs at least 2 points");
  RVector g(n);
  for (int k = 0; k < n; ++k) g(k) = (k - n / 2) / (n * t_sym);
  return g;
}

RVector range_search_grid(int n, double subcarrier_spacing) {
  if (n < 2) throw std::invalid_argument("range grid needs at least 2 points");
  RVector g(n);
  for (int k = 0; k < n; ++k) g(k) = k * kSpeedOfLight / (2.0 * subcarrier_spacing * n);
  return g;
}

std::vector<int> find_peaks(const RVector& values, int count, const PeakOptions& opt) {
  const auto n = static_cast<int>(values.size());
  std::vector<int> out;
  if (n == 0 || count < 1) return out;
  std::vector<double> sorted(values.data(), values.data() + n);
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  const double floor = sorted[static_cast<std::size_t>(n / 2)] * std::pow(10.0, opt.threshold_db / 10.0);

  std::vector<int> candidates;
  for (int k = 0; k < n; ++k) {
    const double v = values(k);
    if (!(v > floor)) continue;
    bool is_max = true;
    if (k > 0 || opt.circular) is_max = is_max && v >= values((k - 1 + n) % n);
    if (k < n - 1 || opt.circular) is_max = is_max && v > values((k + 1) % n);
    if (is_max) candidates.push_back(k);
  }
  std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return values(a) > values(b); });
  for (int k : candidates) {
    const bool clear = std::all_of(out.begin(), out.end(), [&](int p) {
      return circular_distance(k, p, n, opt.circular) > opt.min_separation;
    });
    if (clear) out.push_back(k);
    if (static_cast<int>(out.size()) == count) break;
  }
  return out;
}

PeakSet pick_and_refine(const MusicSearch& search, const PseudoSpectrum& spec, int count, const PeakOptions& opt) {
  PeakSet out;
  std::vector<int> idx = find_peaks(spec.values, count, opt);
  out.found = static_cast<int>(idx.size());
  out.under_resolved = out.found < count;
  if (idx.empty()) {
    Eigen::Index best = 0;
    spec.values.maxCoeff(&best);
    idx.push_back(static_cast<int>(best));
  }
  const auto n = static_cast<int>(spec.grid.size());
  for (int k : idx) {
    const double x = spec.grid(k);
    double left = k > 0 ? x - spec.grid(k - 1) : spec.grid(1) - spec.grid(0);
    double right = k < n - 1 ? spec.grid(k + 1) - x : x - spec.grid(n - 2);
    const double a = std::max(x - left, opt.lower);
    const double b = std::min(x + right, opt.upper);
    const double best = golden_max([&](double t) { return search.evaluate(t); }, a, b);
    out.params.push_back(search.evaluate(best) >= spec.values(k) ? best : x);
  }
  return out;
}

// ---- clutter covariance estimation -------------------------------------------

bool clutter_dominance_warning(const ScenarioConfig& cfg, double margin_db) {
  const PowerAllocation pw = allocate_powers(cfg);
  double strongest = 0.0;
  for (const auto& t : make_targets(cfg)) {
    strongest = std::max(strongest, std::norm(t.gain) * cfg.bs_antennas * pw.sensing_per_element);
  }
  if (strongest <= 0.0) return false;
  const double margin = power_to_db(cfg.clutter_texture) - power_to_db(strongest);
  if (margin < margin_db) {
    spdlog::warn("clutter is only {:.1f} dB above the strongest target; covariance estimates may lock onto targets",
                 margin);
    return true;
  }
  return false;
}

ClutterEstimate estimate_clutter_covariances(const Tensor3& y, const ScenarioConfig& cfg) {
  const double noise = cfg.radar_noise_per_subcarrier();
  return estimate_clutter_from_covariances(sample_cov_space(y, noise), sample_cov_time(y, noise),
                                           sample_cov_freq(y, noise), cfg);
}

ClutterEstimate estimate_clutter_from_covariances(const CMatrix& r_sp, const CMatrix& r_t, const CMatrix& r_f,
                                                  const ScenarioConfig& cfg) {
  const Eigen::Index m = r_sp.rows();
  const Eigen::Index slots = r_t.rows();
  const Eigen::Index subcarriers = r_f.rows();
  const int dim = cfg.effective_clutter_dim();
  const double t_sym = cfg.symbol_time();
  const double df = cfg.subcarrier_spacing;

  ClutterEstimate est;
  est.dominance_warning = clutter_dominance_warning(cfg);

  {
    const MusicSearch search(r_sp, [m](double th) { return steering_angle(th, m); }, dim, cfg.tol);
    est.spatial_spectrum = search.spectrum(angle_search_grid(cfg.angle_grid));
    PeakOptions opt{cfg.peak_threshold_db, 1, false, -kPi / 2 + 1e-9, kPi / 2 - 1e-9};
    est.angles = pick_and_refine(search, est.spatial_spectrum, dim, opt);
  }
  {
    const MusicSearch search(
        r_t, [slots, t_sym](double f) { return steering_doppler(f, slots, t_sym); }, dim,
        cfg.tol);
    est.doppler_spectrum = search.spectrum(doppler_search_grid(cfg.doppler_grid, t_sym));
    PeakOptions opt{cfg.peak_threshold_db, 1, true};
    est.dopplers = pick_and_refine(search, est.doppler_spectrum, dim, opt);
  }
  {
    const MusicSearch search(
        r_f,
        [subcarriers, df](double r) { return steering_delay(2.0 * r / kSpeedOfLight, subcarriers, df); }, dim,
        cfg.tol);
    est.range_spectrum = search.spectrum(range_search_grid(cfg.range_grid, df));
    PeakOptions opt{cfg.peak_threshold_db, 1, true};
    est.ranges = pick_and_refine(search, est.range_spectrum, dim, opt);
    const double unambiguous = kSpeedOfLight / (2.0 * df);
    for (double& r : est.ranges.params) r = r - unambiguous * std::floor(r / unambiguous);
  }
  if (est.under_resolved()) {
    spdlog::warn("clutter MUSIC found fewer than {} peaks on some axis (angle {}, Doppler {}, range {})", dim,
                 est.angles.found, est.dopplers.found, est.ranges.found);
  }

  ClusterSet sp;
  sp.angles = est.angles.params;
  sp.angular_spread = cfg.clutter.angular_spread;
  est.b_sp = spatial_covariance(sp, m);

  ClusterSet tm;
  tm.angles.assign(est.dopplers.params.size(), 0.0);
  tm.angular_spread = cfg.clutter.angular_spread;
  tm.dopplers = est.dopplers.params;
  tm.coherent_symbols = cfg.clutter.coherent_symbols;
  est.b_t = doppler_covariance(tm, slots, t_sym);

  ClusterSet fr;
  fr.angles.assign(est.ranges.params.size(), 0.0);
  fr.angular_spread = cfg.clutter.angular_spread;
  fr.ranges = est.ranges.params;
  fr.delay_spread = cfg.clutter.delay_spread;
  est.b_f = frequency_covariance(fr, cfg.diffuse, subcarriers, df).coherent;
  return est;
}

// ---- whitening and matched filter --------------------------------------------

namespace {

struct AxisSpectrum {
  HermitianEig eig;
  // mean(lambda / (a lambda + b)) and mean(1 / (a lambda + b)): the clutter
  // and noise power an axis keeps after whitening with (a B + b I)^-1/2.
  [[nodiscard]] std::pair<double, double> carried(double a, double b) const {
    double clutter = 0.0;
    double noise = 0.0;
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      const double lambda = std::max(eig.values(k), 0.0);
      const double d = a * lambda + b;
      if (!(d > 0.0)) throw NumericalError("make_whitener: clutter-plus-noise covariance is singular");
      clutter += lambda / d;
      noise += 1.0 / d;
    }
    const auto n = static_cast<double>(eig.values.size());
    return {clutter / n, noise / n};
  }
  [[nodiscard]] CMatrix operator_for(double a, double b) const {
    RVector scale(eig.values.size());
    for (Eigen::Index k = 0; k < scale.size(); ++k) scale(k) = 1.0 / std::sqrt(a * std::max(eig.values(k), 0.0) + b);
    return eig.vectors * scale.asDiagonal() * eig.vectors.adjoint();
  }
};

}  // namespace

Whitener make_whitener(const CMatrix& b_sp, const CMatrix& b_t, const CMatrix& b_f, double texture, double noise_var,
                       const LinalgTolerances& tol) {
  if (texture < 0.0 || noise_var < 0.0) throw std::invalid_argument("make_whitener: negative power");
  const double s_sp = b_sp.diagonal().real().mean();
  const AxisSpectrum time{hermitian_eig(b_t, tol)};
  const AxisSpectrum freq{hermitian_eig(b_f, tol)};

  // Each factor whitens its own axis given what the other factor leaves of
  // the clutter and of the noise; iterate to the common fixed point so that
  // both axis covariances come out as identities.
  double c_f = b_f.diagonal().real().mean();
  double n_f = 1.0;
  double c_t = 0.0;
  double n_t = 0.0;
  for (int it = 0; it < 5000; ++it) {
    std::tie(c_t, n_t) = time.carried(texture * s_sp * c_f, noise_var * n_f);
    const auto [c_next, n_next] = freq.carried(texture * s_sp * c_t, noise_var * n_t);
    const double change = std::abs(c_next - c_f) / c_f + std::abs(n_next - n_f) / n_f;
    c_f = c_next;
    n_f = n_next;
    if (change < 1e-15) break;
  }
  Whitener w;
  w.time = time.operator_for(texture * s_sp * c_f, noise_var * n_f);
  std::tie(c_t, n_t) = time.carried(texture * s_sp * c_f, noise_var * n_f);
  w.freq = freq.operator_for(texture * s_sp * c_t, noise_var * n_t);
  return w;
}

Tensor3 whiten_cube(const Tensor3& y, const Whitener& w) {
  return mode_product(mode_product(y, w.time, 2), w.freq, 3);
}

MatchedFilterOutput matched_filter(const Tensor3& y, const Tensor3& x, const std::vector<int>& streams) {
  if (y.dim(2) != x.dim(2) || y.dim(3) != x.dim(3)) {
    throw std::invalid_argument("matched_filter: Y and X disagree in slots or subcarriers");
  }
  std::vector<int> which = streams;
  if (which.empty()) {
    which.resize(static_cast<std::size_t>(x.dim(1)));
    std::iota(which.begin(), which.end(), 0);
  }
  for (int s : which) {
    if (s < 0 || s >= x.dim(1)) throw std::invalid_argument("matched_filter: stream index out of range");
  }
  MatchedFilterOutput out;
  for (std::size_t n = 0; n < which.size(); ++n) out.phi.emplace_back(y.dims());
  for (Eigen::Index v = 0; v < y.dim(3); ++v) {
    for (Eigen::Index i = 0; i < y.dim(2); ++i) {
      const auto xs = x.fibre(i, v);
      const double energy = xs.squaredNorm();
      if (energy < 1e-24) {
        ++out.gaps;
        for (auto& phi : out.phi) phi.fibre(i, v).setZero();
        continue;
      }
      const auto ys = y.fibre(i, v);
      for (std::size_t n = 0; n < which.size(); ++n) {
        out.phi[n].fibre(i, v) = ys * (std::conj(xs(which[n])) / energy);
      }
    }
  }
  return out;
}

// ---- range, angle and velocity profiles -------------------------------------

Tensor3 range_profiles(const Tensor3& phi, int padded) {
  const Eigen::Index m = phi.dim(1);
  const Eigen::Index slots = phi.dim(2);
  const Eigen::Index subcarriers = phi.dim(3);
  if (padded < subcarriers) throw std::invalid_argument("range_profiles: padded length shorter than the band");
  Tensor3 out(m, slots, padded);
  Eigen::FFT<double> fft;
  std::vector<cd> in(static_cast<std::size_t>(padded));
  std::vector<cd> spec;
  for (Eigen::Index i = 0; i < slots; ++i) {
    for (Eigen::Index a = 0; a < m; ++a) {
      std::fill(in.begin(), in.end(), cd{});
      for (Eigen::Index v = 0; v < subcarriers; ++v) in[static_cast<std::size_t>(v)] = phi(a, i, v);
      fft.fwd(spec, in);
      for (Eigen::Index v = 0; v < padded; ++v) out(a, i, v) = spec[static_cast<std::size_t>(v)];
    }
  }
  return out;
}

RangeAngleMap range_angle_map(const Tensor3& profiles, const RVector& angle_grid, int signal_dim,
                              const LinalgTolerances& tol) {
  const Eigen::Index m = profiles.dim(1);
  const Eigen::Index slots = profiles.dim(2);
  const Eigen::Index bins = profiles.dim(3);
  RangeAngleMap out;
  out.values.resize(bins, angle_grid.size());
  out.peak_angle.resize(static_cast<std::size_t>(bins));
  const SteeringFn steer = [m](double th) { return steering_angle(th, m); };
  for (Eigen::Index v = 0; v < bins; ++v) {
    const auto r = profiles.slice(v);
    CMatrix q = r * r.adjoint() / static_cast<double>(slots);
    q = 0.5 * (q + q.adjoint());
    const MusicSearch search(q, steer, signal_dim, tol);
    RVector values = search.spectrum(angle_grid).values;
    // Peak-preserving sampling: a local maximum cell holds the largest value
    // of the continuous pseudospectrum within one cell on either side.
    RVector refined_at = angle_grid;
    const RVector raw = values;
    const Eigen::Index n = raw.size();
    for (Eigen::Index k = 0; k < n; ++k) {
      const bool left_ok = k == 0 || raw(k) >= raw(k - 1);
      const bool right_ok = k == n - 1 || raw(k) > raw(k + 1);
      if (!left_ok || !right_ok) continue;
      const double lo = angle_grid(std::max<Eigen::Index>(k - 1, 0));
      const double hi = angle_grid(std::min<Eigen::Index>(k + 1, n - 1));
      const double x = golden_max([&](double t) { return search.evaluate(t); }, lo, hi);
      const double fx = search.evaluate(x);
      if (fx > values(k)) {
        values(k) = fx;
        refined_at(k) = x;
      }
    }
    out.values.row(v) = values.transpose();
    Eigen::Index best = 0;
    values.maxCoeff(&best);
    out.peak_angle[static_cast<std::size_t>(v)] = refined_at(best);
  }
  return out;
}

RMatrix range_velocity_map(const Tensor3& profiles, const std::vector<double>& peak_angle, int padded_slots) {
  const Eigen::Index m = profiles.dim(1);
  const Eigen::Index slots = profiles.dim(2);
  const Eigen::Index bins = profiles.dim(3);
  if (static_cast<Eigen::Index>(peak_angle.size()) != bins) {
    throw std::invalid_argument("range_velocity_map: one angle per range bin required");
  }
  if (padded_slots < slots) throw std::invalid_argument("range_velocity_map: padded length shorter than the slots");
  RMatrix out(padded_slots, bins);
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);
  std::vector<cd> in(static_cast<std::size_t>(padded_slots));
  std::vector<cd> seq;
  for (Eigen::Index v = 0; v < bins; ++v) {
    const CVector a = steering_angle(peak_angle[static_cast<std::size_t>(v)], m);
    std::fill(in.begin(), in.end(), cd{});
    const auto r = profiles.slice(v);
    const CVector w = (a.adjoint() * r).transpose();
    for (Eigen::Index i = 0; i < slots; ++i) in[static_cast<std::size_t>(i)] = w(i);
    fft.inv(seq, in);
    for (Eigen::Index j = 0; j < padded_slots; ++j) {
      out(j, v) = std::abs(seq[static_cast<std::size_t>((j + padded_slots / 2) % padded_slots)]);
    }
  }
  return out;
}

double lobe_centre(const RVector& profile, Eigen::Index peak, double drop_db) {
  if (peak < 0 || peak >= profile.size()) throw std::invalid_argument("lobe_centre: peak index out of range");
  const double floor = profile(peak) * std::pow(10.0, -drop_db / 20.0);
  Eigen::Index lo = peak;
  Eigen::Index hi = peak;
  while (lo > 0 && profile(lo - 1) >= floor) --lo;
  while (hi + 1 < profile.size() && profile(hi + 1) >= floor) ++hi;
  return 0.5 * static_cast<double>(lo + hi);
}

RVector kaiser_window(int n, double beta) {
  if (n < 1) throw std::invalid_argument("kaiser_window: length must be positive");
  RVector w(n);
  if (n == 1) {
    w(0) = 1.0;
    return w;
  }
  const double norm = std::cyl_bessel_i(0.0, beta);
  for (int k = 0; k < n; ++k) {
    const double t = 2.0 * k / (n - 1) - 1.0;
    w(k) = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / norm;
  }
  return w;
}

RMatrix postprocess_map(const RMatrix& map, const PostprocessRecord& rec) {
  RMatrix out = map;
  if (rec.sv_fraction > 0.0 && map.size() > 0) {
    const bool by_rows = map.rows() <= map.cols();
    const RMatrix gram = by_rows ? RMatrix(map * map.transpose()) : RMatrix(map.transpose() * map);
    Eigen::SelfAdjointEigenSolver<RMatrix> eig(gram);
    if (eig.info() != Eigen::Success) throw NumericalError("postprocess_map: eigen-solver did not converge");
    const Eigen::Index top = gram.rows() - 1;
    const double s1 = std::sqrt(std::max(eig.eigenvalues()(top), 0.0));
    if (s1 > 0.0) {
      RVector u;
      RVector v;
      if (by_rows) {
        u = eig.eigenvectors().col(top);
        v = map.transpose() * u / s1;
      } else {
        v = eig.eigenvectors().col(top);
        u = map * v / s1;
      }
      out -= rec.sv_fraction * s1 * u * v.transpose();
    }
    out = out.cwiseMax(0.0);
  }
  if (rec.kaiser_beta > 0.0) {
    if (rec.range_along_rows) {
      const RVector w = kaiser_window(static_cast<int>(out.rows()), rec.kaiser_beta);
      out = w.asDiagonal() * out;
    } else {
      const RVector w = kaiser_window(static_cast<int>(out.cols()), rec.kaiser_beta);
      out = out * w.asDiagonal();
    }
  }
  return out;
}

MapAxes map_axes(const ScenarioConfig& cfg, const RVector& angle_grid) {
  MapAxes ax;
  const int bins = cfg.subcarriers_padded;
  const int rows = cfg.slots_padded;
  ax.range_step = kSpeedOfLight / (2.0 * cfg.subcarrier_spacing * bins);
  ax.velocity_step = cfg.wavelength() / (2.0 * rows * cfg.symbol_time());
  ax.range.resize(bins);
  for (int k = 0; k < bins; ++k) ax.range(k) = k * ax.range_step;
  ax.velocity.resize(rows);
  for (int j = 0; j < rows; ++j) ax.velocity(j) = (j - rows / 2) * ax.velocity_step;
  ax.angle = angle_grid;
  return ax;
}

PipelineResult run_radar_pipeline(const Tensor3& y, const Tensor3& x, const ScenarioConfig& cfg, WhiteningMode mode,
                                  const CovarianceModel& truth, const std::vector<int>& streams,
                                  const Tensor3* estimation_cube) {
  PipelineResult res;
  res.mode = mode;
  const double noise = cfg.radar_noise_per_subcarrier();

  MatchedFilterOutput mf;
  if (mode == WhiteningMode::none) {
    mf = matched_filter(y, x, streams);
  } else {
    Whitener w;
    if (mode == WhiteningMode::estimated) {
      res.estimate = estimate_clutter_covariances(estimation_cube != nullptr ? *estimation_cube : y, cfg);
      w = make_whitener(res.estimate.b_sp, res.estimate.b_t, res.estimate.b_f, cfg.clutter_texture, noise, cfg.tol);
    } else {
      w = make_whitener(truth.b_sp, truth.b_t, truth.b_f.total(), truth.texture, noise, cfg.tol);
    }
    mf = matched_filter(whiten_cube(y, w), whiten_cube(x, w), streams);
  }
  res.gaps = mf.gaps;
  if (mf.gaps > 0) spdlog::warn("matched filter skipped {} resource elements with vanishing symbols", mf.gaps);

  std::vector<int> which = streams;
  if (which.empty()) {
    which.resize(static_cast<std::size_t>(x.dim(1)));
    std::iota(which.begin(), which.end(), 0);
  }
  const RVector grid = angle_search_grid(cfg.angle_grid);
  const MapAxes axes = map_axes(cfg, grid);
  for (std::size_t n = 0; n < which.size(); ++n) {
    RadarMaps maps;
    maps.stream = which[n];
    maps.axes = axes;
    const Tensor3 profiles = range_profiles(mf.phi[n], cfg.subcarriers_padded);
    maps.ra = range_angle_map(profiles, grid, cfg.effective_target_dim(), cfg.tol);
    maps.rv = range_velocity_map(profiles, maps.ra.peak_angle, cfg.slots_padded);
    maps.record = {cfg.sv_fraction, cfg.kaiser_beta, true};
    maps.ra_post = postprocess_map(maps.ra.values, maps.record);
    PostprocessRecord rv_rec = maps.record;
    rv_rec.range_along_rows = false;
    maps.rv_post = postprocess_map(maps.rv, rv_rec);
    res.maps.push_back(std::move(maps));
  }
  return res;
}

}  // namespace isac
