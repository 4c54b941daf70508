#include "isac/precoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "isac/scenario.hpp"

namespace isac {

CMatrix pilot_precoder(const CMatrix& c_tx, int ue_antennas, const LinalgTolerances& tol) {
  if (ue_antennas < 1 || ue_antennas > c_tx.rows()) throw std::invalid_argument("pilot_precoder: bad stream count");
  require_psd(c_tx, "C_tx", tol);
  return hermitian_eig(c_tx.transpose(), tol).vectors.leftCols(ue_antennas);
}

CMatrix ue_block_sum(const CMatrix& xi, int ue_antennas) {
  if (ue_antennas < 1 || xi.rows() % ue_antennas != 0 || xi.rows() != xi.cols()) {
    throw std::invalid_argument("ue_block_sum: size is not a multiple of the UE antenna count");
  }
  const Eigen::Index bs = xi.rows() / ue_antennas;
  CMatrix out = CMatrix::Zero(bs, bs);
  for (Eigen::Index b = 0; b < bs; ++b) {
    for (Eigen::Index c = 0; c < bs; ++c) {
      for (int u = 0; u < ue_antennas; ++u) out(b, c) += xi(u + ue_antennas * b, u + ue_antennas * c);
    }
  }
  return out;
}

CMatrix mmse_precoder(const std::vector<CMatrix>& h_hat, const std::vector<CMatrix>& xi_err,
                      const std::vector<double>& gains, double noise_var) {
  if (h_hat.empty() || h_hat.size() != xi_err.size() || h_hat.size() != gains.size()) {
    throw std::invalid_argument("mmse_precoder: per-UE inputs differ in length");
  }
  const Eigen::Index bs = h_hat.front().cols();
  CMatrix t = noise_var * CMatrix::Identity(bs, bs);
  Eigen::Index streams = 0;
  for (std::size_t k = 0; k < h_hat.size(); ++k) {
    const CMatrix& h = h_hat[k];
    if (h.cols() != bs) throw std::invalid_argument("mmse_precoder: channel widths differ");
    t += gains[k] * gains[k] *
         (h.adjoint() * h + ue_block_sum(xi_err[k], static_cast<int>(h.rows())).transpose());
    streams += h.rows();
  }
  CMatrix rhs(bs, streams);
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < h_hat.size(); ++k) {
    rhs.middleCols(col, h_hat[k].rows()) = gains[k] * h_hat[k].adjoint();
    col += h_hat[k].rows();
  }
  t = 0.5 * (t + t.adjoint()).eval();
  Eigen::LLT<CMatrix> llt(t);
  if (llt.info() != Eigen::Success) throw NumericalError("mmse_precoder: regularised Gram matrix is not invertible");
  CMatrix f = llt.solve(rhs);
  for (Eigen::Index s = 0; s < f.cols(); ++s) {
    const double norm = f.col(s).norm();
    if (!(norm > 1e-12 * std::max(1.0, rhs.col(s).norm()) && norm > 0.0)) {
      throw NumericalError("mmse_precoder: stream " + std::to_string(s) + " has a vanishing precoder");
    }
    f.col(s) /= norm;
  }
  return f;
}

namespace {

SensingBeam normalise(CVector f, const CVector& fallback) {
  SensingBeam out;
  const double norm = f.norm();
  if (norm < 1e-12) {
    out.f = fallback / fallback.norm();
    out.degenerate = true;
    return out;
  }
  out.f = f / norm;
  return out;
}

}  // namespace

SensingBeam sensing_precoder(const CMatrix& h_stacked, double theta, Eigen::Index antennas, double rel_cutoff) {
  const CVector a = steering_angle(theta, antennas);
  if (h_stacked.rows() == 0) return normalise(a, a);
  if (h_stacked.cols() != antennas) throw std::invalid_argument("sensing_precoder: channel width differs from array size");
  return normalise(null_space_projector(h_stacked, rel_cutoff) * a, a);
}

SensingBeam sensing_precoder_with_projector(const CMatrix& projector, double theta) {
  const CVector a = steering_angle(theta, projector.rows());
  return normalise(projector * a, a);
}

std::vector<double> beamsweep_angles(double start, double end, int count, bool uniform_in_sine) {
  if (count < 1) throw std::invalid_argument("beamsweep_angles: count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    const double frac = count == 1 ? 0.5 : static_cast<double>(i) / (count - 1);
    out[static_cast<std::size_t>(i)] = uniform_in_sine
                                           ? std::asin(std::sin(start) + frac * (std::sin(end) - std::sin(start)))
                                           : start + frac * (end - start);
  }
  return out;
}

PowerAllocation allocate_powers(const ScenarioConfig& cfg) {
  if (cfg.tradeoff < 0.0 || cfg.tradeoff > 1.0) throw std::invalid_argument("allocate_powers: tradeoff outside [0, 1]");
  PowerAllocation out;
  out.comm_total = cfg.comm_power();
  out.sensing_total = cfg.sensing_power();
  out.comm_per_element = out.comm_total / (static_cast<double>(cfg.comm_streams()) * cfg.subcarriers);
  out.sensing_per_element = out.sensing_total / cfg.subcarriers;
  out.amplitudes = RVector::Constant(cfg.streams(), std::sqrt(out.comm_per_element));
  out.amplitudes(cfg.streams() - 1) = std::sqrt(out.sensing_per_element);
  return out;
}

double ue_snr_db(const ScenarioConfig& cfg, double covariance_trace) {
  return power_to_db(cfg.ue_gain * cfg.ue_gain * cfg.comm_power() * covariance_trace / cfg.ue_noise);
}

}  // namespace isac
