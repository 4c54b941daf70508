#include "isac/covariance.hpp"

#include <cmath>
#include <stdexcept>

#include "isac/bessel.hpp"

namespace isac {

void ClusterSet::validate() const {
  if (angles.empty()) throw std::invalid_argument("cluster set is empty");
  if (!(angular_spread > 0.0)) throw std::invalid_argument("angular spread must be positive");
  for (double a : angles) {
    if (!(std::abs(a) < kPi / 2)) throw std::invalid_argument("cluster angle outside (-90, 90) degrees");
  }
  if (!dopplers.empty() && dopplers.size() != angles.size()) {
    throw std::invalid_argument("cluster dopplers and angles differ in length");
  }
  if (!ranges.empty() && ranges.size() != angles.size()) {
    throw std::invalid_argument("cluster ranges and angles differ in length");
  }
  if (delay_spread < 0.0) throw std::invalid_argument("delay spread must be non-negative");
  if (!(coherent_symbols > 0.0)) throw std::invalid_argument("coherent symbol count must be positive");
}

void DiffuseFreqParams::validate() const {
  if (!(decay_base > 0.0 && decay_base < 1.0)) throw std::invalid_argument("diffuse decay base must lie in (0, 1)");
  if (!(coherence_bandwidth > 0.0)) throw std::invalid_argument("coherence bandwidth must be positive");
  if (power_ratio < 0.0) throw std::invalid_argument("diffuse power ratio must be non-negative");
}

void CovarianceModel::check(const LinalgTolerances& tol) const {
  require_psd(c_tx, "C_tx", tol);
  require_psd(c_rx, "C_rx", tol);
  require_psd(b_sp, "B_sp", tol);
  require_psd(b_t, "B_t", tol);
  require_psd(b_f.total(), "B_f", tol);
  if (zeta.empty() || zeta.front() != 1.0) throw NumericalError("temporal correlation must start at 1");
}

namespace {

// Fills a Hermitian Toeplitz matrix from its lag function lag -> value(lag),
// lag = l - m >= 0 below the diagonal.
template <typename F>
CMatrix hermitian_toeplitz(Eigen::Index n, F&& value) {
  std::vector<cd> first(static_cast<std::size_t>(n));
  for (Eigen::Index d = 0; d < n; ++d) first[static_cast<std::size_t>(d)] = value(static_cast<double>(d));
  first[0] = cd{first[0].real(), 0.0};
  return toeplitz_from_row(std::span<const cd>(first));
}

}  // namespace

CMatrix spatial_covariance(const ClusterSet& clusters, Eigen::Index antennas) {
  if (antennas < 1) throw std::invalid_argument("spatial_covariance: antenna count must be >= 1");
  clusters.validate();
  const double inv_n = 1.0 / static_cast<double>(clusters.size());
  return hermitian_toeplitz(antennas, [&](double d) {
    cd acc{0.0, 0.0};
    for (double psi : clusters.angles) {
      const double spread = kPi * d * std::cos(psi) * clusters.angular_spread;
      acc += std::exp(-kJ * (kPi * d * std::sin(psi))) * std::exp(-0.5 * spread * spread);
    }
    return acc * inv_n;
  });
}

double temporal_corr(double lag, double doppler, double t_sym) {
  if (lag < 0.0) throw std::invalid_argument("temporal_corr: negative lag");
  return bessel_j0(2.0 * kPi * t_sym * doppler * lag);
}

std::vector<double> temporal_corr_sequence(std::size_t max_lag, double doppler, double t_sym) {
  std::vector<double> out(max_lag + 1);
  for (std::size_t i = 0; i <= max_lag; ++i) out[i] = temporal_corr(static_cast<double>(i), doppler, t_sym);
  return out;
}

double doppler_spread(double coherent_symbols, double t_sym) {
  return 1.0 / (2.0 * kPi * t_sym * coherent_symbols);
}

CMatrix doppler_covariance(const ClusterSet& clusters, Eigen::Index slots, double t_sym) {
  clusters.validate();
  if (clusters.dopplers.size() != clusters.size()) {
    throw std::invalid_argument("doppler_covariance: every patch needs a Doppler shift");
  }
  if (slots < 1) throw std::invalid_argument("doppler_covariance: slot count must be >= 1");
  const double inv_n = 1.0 / static_cast<double>(clusters.size());
  const double ic = clusters.coherent_symbols;
  return hermitian_toeplitz(slots, [&](double d) {
    cd acc{0.0, 0.0};
    for (double f : clusters.dopplers) acc += std::exp(-kJ * (2.0 * kPi * f * t_sym * d));
    return acc * inv_n * std::exp(-d * d / (2.0 * ic * ic));
  });
}

FrequencyCovariance frequency_covariance(const ClusterSet& clusters, const DiffuseFreqParams& diffuse,
                                         Eigen::Index subcarriers, double subcarrier_spacing) {
  clusters.validate();
  diffuse.validate();
  if (clusters.ranges.size() != clusters.size()) {
    throw std::invalid_argument("frequency_covariance: every patch needs a median range");
  }
  if (subcarriers < 1) throw std::invalid_argument("frequency_covariance: subcarrier count must be >= 1");
  const double inv_n = 1.0 / static_cast<double>(clusters.size());
  FrequencyCovariance out;
  out.coherent = hermitian_toeplitz(subcarriers, [&](double d) {
    cd acc{0.0, 0.0};
    for (double r : clusters.ranges) {
      acc += std::exp(kJ * (2.0 * kPi * subcarrier_spacing * (2.0 * r / kSpeedOfLight) * d));
    }
    const double spread = kPi * subcarrier_spacing * d * clusters.delay_spread;
    return acc * inv_n * std::exp(-2.0 * spread * spread);
  });
  std::vector<double> row(static_cast<std::size_t>(subcarriers));
  const double step = subcarrier_spacing / diffuse.coherence_bandwidth;
  for (std::size_t d = 0; d < row.size(); ++d) {
    row[d] = diffuse.power_ratio * std::pow(diffuse.decay_base, static_cast<double>(d) * step);
  }
  out.diffuse = toeplitz_from_row(std::span<const double>(row));
  return out;
}

CMatrix ue_covariance(const CMatrix& c_tx, const CMatrix& c_rx) {
  CMatrix c = kron(c_tx, c_rx);
  const double tr = c.trace().real();
  if (!(tr > 0.0)) throw NumericalError("ue_covariance: non-positive trace");
  return c / tr;
}

ClutterSampler::ClutterSampler(const CMatrix& b_sp, const CMatrix& b_t, const CMatrix& b_f, double texture,
                               const LinalgTolerances& tol)
    : root_sp_(sqrt_psd(b_sp, tol)),
      root_t_(sqrt_psd(b_t, tol)),
      root_f_(sqrt_psd(b_f, tol)),
      amplitude_(std::sqrt(texture)) {
  if (texture < 0.0) throw std::invalid_argument("clutter texture must be non-negative");
}

ClutterSampler::ClutterSampler(const CovarianceModel& model, const LinalgTolerances& tol)
    : ClutterSampler(model.b_sp, model.b_t, model.b_f.total(), model.texture, tol) {}

Tensor3 ClutterSampler::draw(Rng& rng) const {
  Tensor3 white = rng.complex_normal_cube(dims());
  Tensor3 out = mode_product(white, root_sp_, 1);
  out = mode_product(out, root_t_, 2);
  out = mode_product(out, root_f_, 3);
  out *= cd{amplitude_, 0.0};
  return out;
}

Tensor3 sample_separable_clutter(const CovarianceModel& model, const Tensor3::Dims& dims, Rng& rng) {
  if (model.b_sp.rows() != dims[0] || model.b_t.rows() != dims[1] || model.b_f.coherent.rows() != dims[2]) {
    throw std::invalid_argument("sample_separable_clutter: factor sizes do not match cube dimensions");
  }
  return ClutterSampler(model).draw(rng);
}

}  // namespace isac
