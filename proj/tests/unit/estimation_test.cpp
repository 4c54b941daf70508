#include <gtest/gtest.h>

#include <cmath>

#include "isac/estimation.hpp"
#include "isac/experiments.hpp"
#include "isac/precoding.hpp"
#include "oracles.hpp"

namespace isac {
namespace {

struct EstimationCase {
  ScenarioConfig cfg;
  CovarianceModel model;
  EstimatorInputs in;
};

EstimationCase small_setup(const std::map<std::string, std::string>& extra = {}) {
  std::map<std::string, std::string> e = {{"array.bs_antennas", "8"}, {"ofdm.slots", "64"}};
  for (const auto& [k, v] : extra) e[k] = v;
  EstimationCase s{testing::full_config(e), {}, {}};
  s.model = build_covariance_model(s.cfg);
  s.in = estimator_inputs(s.cfg, s.model);
  return s;
}

// LMMSE from the joint covariance of (h_i, y) written out directly.
CMatrix reference_error_covariance(const EstimationCase& s, const PilotHistory& h, int offset) {
  const Eigen::Index n = s.in.c_k.rows();
  const int p = h.count();
  const int ue = s.in.ue_antennas;
  const Eigen::Index rows = h.obs.front().fp.cols() * ue;
  CMatrix op = CMatrix::Zero(rows * p, n * p);
  for (int j = 0; j < p; ++j) {
    const CMatrix& fp = h.obs[static_cast<std::size_t>(j)].fp;
    for (Eigen::Index s_ = 0; s_ < fp.cols(); ++s_)
      for (Eigen::Index b = 0; b < fp.rows(); ++b)
        for (int u = 0; u < ue; ++u) op(j * rows + s_ * ue + u, j * n + b * ue + u) = fp(b, s_);
  }
  const double amp = s.in.gain * std::sqrt(static_cast<double>(s.in.pilot_len));
  CMatrix joint_hh(n * p, n * p);
  CMatrix cross(n, n * p);
  for (int a = 0; a < p; ++a) {
    cross.middleCols(a * n, n) = s.model.zeta[static_cast<std::size_t>(offset + a * h.spacing)] * s.in.c_k;
    for (int b = 0; b < p; ++b)
      joint_hh.block(a * n, b * n, n, n) = s.model.zeta[static_cast<std::size_t>(std::abs(a - b) * h.spacing)] * s.in.c_k;
  }
  const CMatrix r_yy = amp * amp * op * joint_hh * op.adjoint() +
                       s.in.noise_var * CMatrix::Identity(rows * p, rows * p);
  const CMatrix r_hy = amp * cross * op.adjoint();
  return s.in.c_k - r_hy * r_yy.ldlt().solve(r_hy.adjoint());
}

TEST(MmseEstimate, MatchesDirectLmmse) {
  const EstimationCase s = small_setup();
  const PilotHistory h = analytic_history(s.cfg, s.model, 22, 3);
  for (int offset : {0, 4, 10}) {
    const ChannelEstimate est = mmse_estimate(h, s.in, offset);
    const CMatrix ref = reference_error_covariance(s, h, offset);
    EXPECT_LT((est.xi_err - ref).norm(), 1e-9) << "offset " << offset;
    EXPECT_NEAR(est.nmse, ref.trace().real(), 1e-9);
  }
}

TEST(MmseEstimate, CovariancesSplitTheChannelCovariance) {
  const EstimationCase s = small_setup();
  const ChannelEstimate est = mmse_estimate(analytic_history(s.cfg, s.model, 11, 2), s.in, 3);
  EXPECT_LT((est.xi_hat + est.xi_err - s.in.c_k).norm(), 1e-12);
  EXPECT_NO_THROW(require_psd(est.xi_hat, "xi_hat"));
  EXPECT_NO_THROW(require_psd(est.xi_err, "xi_err"));
  EXPECT_GT(est.nmse, 0.0);
  EXPECT_LT(est.nmse, 1.0);
  EXPECT_TRUE(est.h_hat.size() == 0);  // no observations attached
}

TEST(MmseEstimate, SinglePilotScalesWithSquaredCorrelation) {
  const EstimationCase s = small_setup();
  const PilotHistory h = analytic_history(s.cfg, s.model, 0, 1);
  const ChannelEstimate e0 = mmse_estimate(h, s.in, 0);
  for (int i : {1, 5, 10}) {
    const ChannelEstimate ei = mmse_estimate(h, s.in, i);
    const double z = s.model.zeta[static_cast<std::size_t>(i)];
    EXPECT_LT((ei.xi_hat - z * z * e0.xi_hat).norm(), 1e-12);
  }
}

TEST(MmseEstimate, MorePastPilotsNeverHurt) {
  // Histories ending at the same pilot are nested, so the error is monotone.
  const EstimationCase s = small_setup({{"ue.doppler_hz", "100"}, {"frame.past_pilots", "6"}});
  const int newest = 6 * (s.cfg.frame_size + 1);
  for (int i = 0; i <= s.cfg.frame_size; ++i) {
    double prev = 2.0;
    for (int p = 0; p <= 6; ++p) {
      const double nmse = mmse_estimate(analytic_history(s.cfg, s.model, newest, p + 1), s.in, i).nmse;
      EXPECT_LE(nmse, prev + 1e-12) << "p " << p << " i " << i;
      prev = nmse;
    }
  }
}

TEST(MmseEstimate, NoiseLimits) {
  EstimationCase s = small_setup();
  const PilotHistory h = analytic_history(s.cfg, s.model, 0, 1);
  s.in.noise_var = 1e10;
  EXPECT_NEAR(mmse_estimate(h, s.in, 0).nmse, 1.0, 1e-6);
  s.in.noise_var = s.cfg.ue_noise_per_subcarrier();
  const double base = mmse_estimate(h, s.in, 0).nmse;
  s.in.noise_var *= 10.0;
  EXPECT_GT(mmse_estimate(h, s.in, 0).nmse, base);
}

TEST(MmseEstimate, FilterAppliedToObservations) {
  const EstimationCase s = small_setup();
  PilotHistory h = analytic_history(s.cfg, s.model, 11, 2);
  Rng rng(3);
  for (auto& o : h.obs) o.y = rng.complex_normal_matrix(o.fp.cols() * s.in.ue_antennas, 1);
  const ChannelEstimate est = mmse_estimate(h, s.in, 2);
  ASSERT_EQ(est.h_hat.size(), s.in.c_k.rows());
  EXPECT_LT((est.h_hat - est.filter * h.stacked()).norm(), 1e-15 * (1.0 + est.h_hat.norm()));
}

TEST(MmseEstimate, Errors) {
  const EstimationCase s = small_setup();
  PilotHistory h = analytic_history(s.cfg, s.model, 22, 3);
  EXPECT_THROW(mmse_estimate(h, s.in, -1), std::invalid_argument);
  h.obs[1].slot += 1;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  EXPECT_THROW(PilotHistory{}.validate(), std::invalid_argument);
}

TEST(StackedOperator, BlockDiagonalKronecker) {
  const EstimationCase s = small_setup();
  const PilotHistory h = analytic_history(s.cfg, s.model, 11, 2);
  const CMatrix f = build_stacked_operator(h, 2);
  ASSERT_EQ(f.rows(), 2 * 3 * 2);
  ASSERT_EQ(f.cols(), 2 * 16);
  EXPECT_LT((f.block(6, 16, 6, 16) - kron(h.obs[1].fp.transpose(), CMatrix::Identity(2, 2))).norm(), 1e-15);
  EXPECT_EQ(f.block(0, 16, 6, 16).norm(), 0.0);
}

TEST(NmseCurve, OneValuePerSlot) {
  const EstimationCase s = small_setup();
  const auto c = nmse_curve(analytic_history(s.cfg, s.model, 0, 1), s.in, 10);
  ASSERT_EQ(c.size(), 11u);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_GE(c[i], c[i - 1] - 1e-12);
}

}  // namespace
}  // namespace isac
