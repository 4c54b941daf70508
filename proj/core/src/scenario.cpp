#include "isac/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace isac {

CVector steering_angle(double theta, Eigen::Index m) {
  CVector a(m);
  const double s = std::sin(theta);
  for (Eigen::Index n = 0; n < m; ++n) {
    const double idx = static_cast<double>(n) - static_cast<double>(m / 2);
    a(n) = std::exp(-kJ * (kPi * idx * s));
  }
  return a;
}

CVector steering_doppler(double doppler, Eigen::Index slots, double t_sym) {
  CVector b(slots);
  for (Eigen::Index i = 0; i < slots; ++i) b(i) = std::exp(-kJ * (2.0 * kPi * doppler * t_sym * static_cast<double>(i)));
  return b;
}

CVector steering_delay(double delay, Eigen::Index subcarriers, double subcarrier_spacing) {
  CVector d(subcarriers);
  for (Eigen::Index v = 0; v < subcarriers; ++v) {
    d(v) = std::exp(kJ * (2.0 * kPi * subcarrier_spacing * delay * static_cast<double>(v)));
  }
  return d;
}

cd target_gain(double range, double rcs, double carrier) {
  if (!(range > 0.0)) throw std::invalid_argument("target_gain: range must be positive");
  const double c2 = kSpeedOfLight * kSpeedOfLight;
  const double power = c2 * rcs / (std::pow(4.0 * kPi, 3) * carrier * carrier * std::pow(range, 4));
  // Reduce the phase modulo 2 pi before exp() to keep full precision.
  const double cycles = carrier * 2.0 * range / kSpeedOfLight;
  const double phase = 2.0 * kPi * (cycles - std::floor(cycles));
  return std::sqrt(power) * std::exp(kJ * phase);
}

TargetSet make_targets(const ScenarioConfig& cfg) {
  TargetSet out;
  for (const auto& t : cfg.targets) {
    Target tg;
    tg.range = std::hypot(t.x, t.y);
    tg.theta = std::atan2(t.y, t.x);
    tg.delay = 2.0 * tg.range / kSpeedOfLight;
    tg.velocity = t.velocity;
    tg.doppler = 2.0 * t.velocity / cfg.wavelength();
    tg.gain = target_gain(tg.range, t.rcs, cfg.carrier);
    out.push_back(tg);
  }
  return out;
}

CMatrix sensing_channel(Eigen::Index slot, Eigen::Index subcarrier, const TargetSet& targets,
                        const ScenarioConfig& cfg) {
  const Eigen::Index m = cfg.bs_antennas;
  CMatrix g = CMatrix::Zero(m, m);
  const double t_sym = cfg.symbol_time();
  for (const auto& t : targets) {
    const CVector a = steering_angle(t.theta, m);
    const cd phase = std::exp(-kJ * (2.0 * kPi * t.doppler * t_sym * static_cast<double>(slot))) *
                     std::exp(kJ * (2.0 * kPi * cfg.subcarrier_spacing * static_cast<double>(subcarrier) * t.delay));
    g.noalias() += (t.gain * phase) * (a * a.adjoint());
  }
  return g;
}

CMatrix UEChannelSeries::matrix(Eigen::Index n, Eigen::Index ue_antennas) const {
  const Eigen::Index bs = h.rows() / ue_antennas;
  return Eigen::Map<const CMatrix>(h.col(n).data(), ue_antennas, bs);
}

UEChannelSeries sample_channel_series_impl(const CMatrix& c_k, const std::vector<int>& slots, const RMatrix& temporal,
                                           Rng& rng) {
  for (std::size_t n = 1; n < slots.size(); ++n) {
    if (slots[n] < slots[n - 1]) throw std::invalid_argument("sample_channel_series: slots must be sorted");
  }
  UEChannelSeries out;
  out.slots = slots;
  const Eigen::Index n = temporal.rows();
  Eigen::LLT<RMatrix> llt(temporal);
  if (llt.info() != Eigen::Success) {
    llt.compute(temporal + 1e-10 * RMatrix::Identity(n, n));
    out.ridge_applied = true;
    spdlog::debug("temporal correlation over {} slots is not positive definite; added a 1e-10 ridge", n);
    if (llt.info() != Eigen::Success) {
      throw NumericalError("sample_channel_series: temporal correlation is indefinite beyond the ridge");
    }
  }
  const RMatrix lower = llt.matrixL();
  const CMatrix root = sqrt_psd(c_k);
  const CMatrix white = rng.complex_normal_matrix(c_k.rows(), n);
  out.h = root * white * lower.transpose().cast<cd>();
  return out;
}

UEChannelSeries sample_ue_channel_series(const ScenarioConfig& cfg, const CMatrix& c_k, const std::vector<int>& slots,
                                         Rng& rng) {
  const double t_sym = cfg.symbol_time();
  const double fd = cfg.ue_doppler;
  return sample_channel_series(c_k, slots, [&](int lag) { return temporal_corr(lag, fd, t_sym); }, rng);
}

CMatrix pilot_matrix(int ue, int streams, int pilot_len) {
  if (pilot_len < (ue + 1) * streams) {
    throw std::invalid_argument("pilot_matrix: pilot length " + std::to_string(pilot_len) + " too short for UE " +
                                std::to_string(ue));
  }
  CMatrix p(streams, pilot_len);
  for (int s = 0; s < streams; ++s) {
    const int row = ue * streams + s;
    for (int t = 0; t < pilot_len; ++t) {
      const long long k = static_cast<long long>(row) * t % pilot_len;
      p(s, t) = std::exp(-kJ * (2.0 * kPi * static_cast<double>(k) / pilot_len));
    }
  }
  return p;
}

CMatrix received_pilot(double gain, const CMatrix& h, const CMatrix& fp, const CMatrix& pilots, double noise_var,
                       Rng& rng) {
  if (h.cols() != fp.rows() || fp.cols() != pilots.rows()) {
    throw std::invalid_argument("received_pilot: dimension mismatch between channel, precoder and pilots");
  }
  CMatrix y = gain * h * fp * pilots;
  if (noise_var > 0.0) y += rng.complex_normal_matrix(y.rows(), y.cols(), noise_var);
  return y;
}

Tensor3 symbol_cube(const ScenarioConfig& cfg, Rng& rng) {
  const int s_count = cfg.streams();
  Tensor3 x = rng.complex_normal_cube({s_count, cfg.slots, cfg.subcarriers});
  CMatrix pilots = CMatrix::Zero(s_count, cfg.pilot_subcarriers);
  for (int k = 0; k < cfg.ues; ++k) pilots += pilot_matrix(k, s_count, cfg.pilot_subcarriers);
  for (int i = 0; i < cfg.slots; ++i) {
    if (!is_pilot_slot(i, cfg.frame_size)) continue;
    for (int v = 0; v < cfg.subcarriers; ++v) {
      const int t = v % cfg.coherent_subcarriers;
      if (t < cfg.pilot_subcarriers) x.fibre(i, v) = pilots.col(t);
    }
  }
  return x;
}

Tensor3 received_radar_cube(const ScenarioConfig& cfg, const TargetSet& targets, const PrecoderSchedule& schedule,
                            const Tensor3& symbols, const ClutterSampler* clutter, Rng& rng,
                            const RadarCubeParts& parts) {
  const Eigen::Index m = cfg.bs_antennas;
  const Eigen::Index slots = cfg.slots;
  const Eigen::Index subcarriers = cfg.subcarriers;
  if (symbols.dim(1) != cfg.streams() || symbols.dim(2) != slots || symbols.dim(3) != subcarriers) {
    throw std::invalid_argument("received_radar_cube: symbol cube does not match the configuration");
  }
  if (schedule.slots != slots || schedule.amplitudes.size() != symbols.dim(1)) {
    throw std::invalid_argument("received_radar_cube: precoder schedule does not match the configuration");
  }
  Tensor3 y(m, slots, subcarriers);
  if (parts.targets && !targets.empty()) {
    const double t_sym = cfg.symbol_time();
    std::vector<CVector> steer;
    const CVector amp = schedule.amplitudes.cast<cd>();
    for (const auto& t : targets) steer.push_back(steering_angle(t.theta, m));
    CVector s(m);
    for (Eigen::Index v = 0; v < subcarriers; ++v) {
      for (Eigen::Index i = 0; i < slots; ++i) {
        s.noalias() = schedule.at(static_cast<int>(i), static_cast<int>(v)) *
                      amp.cwiseProduct(symbols.fibre(i, v)).eval();
        auto out = y.fibre(i, v);
        for (std::size_t l = 0; l < targets.size(); ++l) {
          const auto& t = targets[l];
          const double phase = -2.0 * kPi * t.doppler * t_sym * static_cast<double>(i) +
                               2.0 * kPi * cfg.subcarrier_spacing * static_cast<double>(v) * t.delay;
          const cd coeff = t.gain * std::exp(kJ * phase) * steer[l].dot(s);
          out += coeff * steer[l];
        }
      }
    }
  }
  if (parts.clutter && clutter != nullptr) {
    if (clutter->dims() != y.dims()) throw std::invalid_argument("received_radar_cube: clutter sampler dimensions differ");
    y += clutter->draw(rng);
  }
  if (parts.noise && cfg.radar_noise > 0.0) y += rng.complex_normal_cube(y.dims(), cfg.radar_noise_per_subcarrier());
  return y;
}

}  // namespace isac
