#include "isac/estimation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <spdlog/spdlog.h>

namespace isac {

CMatrix despread(const CMatrix& y, const CMatrix& pilots, int pilot_len) {
  if (y.cols() != pilots.cols() || pilots.cols() != pilot_len) {
    throw std::invalid_argument("despread: observation and pilot lengths differ");
  }
  return y * pilots.adjoint() / std::sqrt(static_cast<double>(pilot_len));
}

CVector PilotHistory::stacked() const {
  Eigen::Index total = 0;
  for (const auto& o : obs) total += o.y.size();
  CVector out(total);
  Eigen::Index pos = 0;
  for (const auto& o : obs) {
    out.segment(pos, o.y.size()) = o.y;
    pos += o.y.size();
  }
  return out;
}

void PilotHistory::validate() const {
  if (obs.empty()) throw std::invalid_argument("pilot history is empty");
  for (std::size_t j = 1; j < obs.size(); ++j) {
    if (obs[j - 1].slot - obs[j].slot != spacing) {
      throw std::invalid_argument("pilot history slots must be spaced frame_size + 1 apart, newest first");
    }
  }
}

CMatrix build_stacked_operator(const PilotHistory& history, int ue_antennas) {
  history.validate();
  const Eigen::Index bs = history.obs.front().fp.rows();
  const Eigen::Index s = history.obs.front().fp.cols();
  const Eigen::Index rows = s * ue_antennas;
  const Eigen::Index cols = bs * ue_antennas;
  const CMatrix eye = CMatrix::Identity(ue_antennas, ue_antennas);
  CMatrix out = CMatrix::Zero(rows * history.count(), cols * history.count());
  for (int j = 0; j < history.count(); ++j) {
    const CMatrix& fp = history.obs[static_cast<std::size_t>(j)].fp;
    if (fp.rows() != bs || fp.cols() != s) throw std::invalid_argument("build_stacked_operator: precoder sizes differ");
    out.block(j * rows, j * cols, rows, cols) = kron(fp.transpose(), eye);
  }
  return out;
}

namespace {

double zeta_at(const std::vector<double>& zeta, int lag) {
  if (lag < 0 || lag >= static_cast<int>(zeta.size())) {
    throw std::invalid_argument("temporal correlation table too short for lag " + std::to_string(lag));
  }
  return zeta[static_cast<std::size_t>(lag)];
}

}  // namespace

ChannelEstimate mmse_estimate(const PilotHistory& history, const EstimatorInputs& in, int offset) {
  if (offset < 0) throw std::invalid_argument("mmse_estimate: negative slot offset");
  const CMatrix f = build_stacked_operator(history, in.ue_antennas);
  const int p_tot = history.count();
  const Eigen::Index n = in.c_k.rows();
  if (f.cols() != n * p_tot) throw std::invalid_argument("mmse_estimate: covariance size does not match the precoders");

  // Cross covariance E[h_i h_stack^H] and stacked covariance E[h_stack h_stack^H].
  CMatrix e(n, n * p_tot);
  CMatrix m(n * p_tot, n * p_tot);
  for (int a = 0; a < p_tot; ++a) {
    e.middleCols(a * n, n) = zeta_at(in.zeta, offset + a * history.spacing) * in.c_k;
    for (int b = 0; b < p_tot; ++b) {
      m.block(a * n, b * n, n, n) = zeta_at(in.zeta, std::abs(a - b) * history.spacing) * in.c_k;
    }
  }

  const double a2 = in.gain * in.gain * in.pilot_len;
  const double scale = in.gain * std::sqrt(static_cast<double>(in.pilot_len));
  CMatrix a_bar = a2 * f * m * f.adjoint();
  a_bar = 0.5 * (a_bar + a_bar.adjoint()).eval();
  a_bar.diagonal().array() += in.noise_var;

  ChannelEstimate out;
  out.offset = offset;
  const double tr = a_bar.trace().real();
  bool ill_conditioned = false;
  // lambda_max <= trace and lambda_min >= noise, so the eigen-solve is only
  // needed when this cheap bound is inconclusive.
  if (!(in.noise_var > 0.0) || tr / in.noise_var > 1e12) {
    const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(a_bar, Eigen::EigenvaluesOnly).eigenvalues();
    ill_conditioned = !(ev(0) > 0.0) || ev(ev.size() - 1) / ev(0) > 1e12;
  }
  if (ill_conditioned) {
    a_bar.diagonal().array() += 1e-12 * tr;
    out.ridge_applied = true;
    spdlog::warn("observation covariance condition number exceeds 1e12; added a {:.3g} ridge", 1e-12 * tr);
  }
  Eigen::LLT<CMatrix> llt(a_bar);
  if (llt.info() != Eigen::Success) throw NumericalError("mmse_estimate: observation covariance is not invertible");
  // cross = E F^H; A = scale * cross * Abar^-1 = scale * (Abar^-1 cross^H)^H.
  const CMatrix cross = e * f.adjoint();
  const CMatrix solved = llt.solve(cross.adjoint());
  out.filter = scale * solved.adjoint();
  out.xi_hat = a2 * cross * solved;
  out.xi_hat = 0.5 * (out.xi_hat + out.xi_hat.adjoint()).eval();
  out.xi_err = in.c_k - out.xi_hat;
  out.xi_err = 0.5 * (out.xi_err + out.xi_err.adjoint()).eval();
  require_psd(out.xi_hat, "estimate covariance", in.tol);
  require_psd(out.xi_err, "estimation error covariance", in.tol);
  out.nmse = out.xi_err.trace().real();

  bool have_obs = true;
  for (const auto& o : history.obs) have_obs = have_obs && o.y.size() > 0;
  if (have_obs) out.h_hat = out.filter * history.stacked();
  return out;
}

std::vector<double> nmse_curve(const PilotHistory& history, const EstimatorInputs& in, int frame_size) {
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(frame_size + 1));
  for (int i = 0; i <= frame_size; ++i) out.push_back(mmse_estimate(history, in, i).nmse);
  return out;
}

}  // namespace isac
