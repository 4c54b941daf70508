// Acceptance checks. Prints one "criterion N: PASS|FAIL ..." line per
// criterion and exits nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/SVD>

#include "isac/estimation.hpp"
#include "isac/experiments.hpp"
#include "isac/precoding.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace isac;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

std::string percent(double v) { return fmt(100.0 * v, 3) + "%"; }

Eigen::Index row_of(const GridAxis& axis, const std::string& label) {
  const auto it = std::find(axis.labels.begin(), axis.labels.end(), label);
  if (it == axis.labels.end()) throw std::runtime_error("grid has no row " + label);
  return it - axis.labels.begin();
}

const ResultGrid& grid_at(const ExperimentResult& r, const std::string& point) {
  for (const auto& g : r.grids) {
    if (g.point == point) return g.grid;
  }
  throw std::runtime_error("no grid for " + point);
}

// ---- 1: Monte Carlo error of the aging-aware estimator ---------------------

// Square root of a PSD matrix by eigendecomposition, independent of the
// library's factorisations.
CMatrix psd_root(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  const RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.cast<cd>().asDiagonal();
}

Outcome criterion_1() {
  const int draws = 10000;
  const std::vector<int> offsets = {0, 5, 10};
  ScenarioConfig cfg = testing::desk_config({{"array.bs_antennas", "8"}, {"frame.frame_size", "10"}});
  std::mt19937_64 geometry(20240611);
  std::uniform_real_distribution<double> angle(-kPi / 3.0, kPi / 3.0);
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  double worst = 0.0;
  std::string worst_at;
  for (int g = 0; g < 5; ++g) {
    for (double& a : cfg.ue_tx_clusters.angles) a = angle(geometry);
    const CovarianceModel model = build_covariance_model(cfg);
    const EstimatorInputs in = estimator_inputs(cfg, model);
    const Eigen::Index n = model.c_k.rows();
    const CMatrix pilots = pilot_matrix(0, cfg.streams(), cfg.pilot_subcarriers);
    for (int p : {0, 2}) {
      const int newest = p * (cfg.frame_size + 1);
      PilotHistory history = analytic_history(cfg, model, newest, p + 1);
      std::vector<int> slots;
      for (const auto& o : history.obs) slots.push_back(o.slot);
      for (int off : offsets) slots.push_back(newest + off);
      const auto count = static_cast<Eigen::Index>(slots.size());
      RMatrix temporal(count, count);
      for (Eigen::Index a = 0; a < count; ++a)
        for (Eigen::Index b = 0; b < count; ++b)
          temporal(a, b) = model.zeta[static_cast<std::size_t>(std::abs(slots[a] - slots[b]))];
      const CMatrix root = psd_root(kron(temporal.cast<cd>(), model.c_k));

      std::vector<ChannelEstimate> est;
      for (int off : offsets) est.push_back(mmse_estimate(history, in, off));
      std::vector<double> sq(offsets.size(), 0.0);
      Rng noise_rng(mix_seed(cfg.seed, static_cast<std::uint64_t>(10 * g + p)));
      CVector z(root.cols());
      for (int d = 0; d < draws; ++d) {
        for (Eigen::Index k = 0; k < z.size(); ++k) z(k) = cd(gauss(geometry), gauss(geometry));
        const CVector h = root * z;
        for (std::size_t j = 0; j < history.obs.size(); ++j) {
          const CVector hj = h.segment(static_cast<Eigen::Index>(j) * n, n);
          const CMatrix hmat = Eigen::Map<const CMatrix>(hj.data(), cfg.ue_antennas, cfg.bs_antennas);
          const CMatrix y = received_pilot(in.gain, hmat, history.obs[j].fp, pilots, in.noise_var, noise_rng);
          const CMatrix ds = despread(y, pilots, cfg.pilot_subcarriers);
          history.obs[j].y = Eigen::Map<const CVector>(ds.data(), ds.size());
        }
        const CVector stacked = history.stacked();
        for (std::size_t o = 0; o < offsets.size(); ++o) {
          const Eigen::Index at = static_cast<Eigen::Index>(history.obs.size() + o) * n;
          sq[o] += (h.segment(at, n) - est[o].filter * stacked).squaredNorm();
        }
      }
      for (std::size_t o = 0; o < offsets.size(); ++o) {
        const double mc = sq[o] / draws;
        const double dev = std::abs(mc - est[o].nmse) / est[o].nmse;
        if (dev > worst) {
          worst = dev;
          worst_at = "geometry " + std::to_string(g) + " p=" + std::to_string(p) + " offset " +
                     std::to_string(offsets[o]) + " (MC " + fmt(mc) + " vs " + fmt(est[o].nmse) + ")";
        }
      }
    }
  }
  return {worst <= 0.02, "largest relative deviation " + percent(worst) + " at " + worst_at + ", limit 2%"};
}

// ---- 2, 3: NMSE along the frame -------------------------------------------

ExperimentResult frame_run(const ScenarioConfig& base, std::vector<std::string> frames, std::vector<std::string> dopplers,
                           std::vector<std::string> pasts) {
  ExperimentSpec spec;
  spec.id = "nmse-frame";
  spec.base = base;
  spec.seeds = {base.seed};
  spec.sweeps = {{"frame.frame_size", std::move(frames)},
                 {"ue.doppler_hz", std::move(dopplers)},
                 {"frame.past_pilots", std::move(pasts)}};
  return run_nmse_frame(spec);
}

Outcome criterion_2() {
  const ExperimentResult r = frame_run(testing::desk_config(), {"10", "35"}, {"50", "100"}, {"0", "2", "6"});
  int order = 0;
  int shape = 0;
  for (const auto& g : r.grids) {
    const RMatrix& v = g.grid.values;
    const Eigen::Index p0 = row_of(g.grid.rows, "p0");
    const Eigen::Index p2 = row_of(g.grid.rows, "p2");
    const Eigen::Index p6 = row_of(g.grid.rows, "p6");
    for (Eigen::Index i = 0; i < v.cols(); ++i) {
      if (!(v(p6, i) <= v(p2, i) && v(p2, i) <= v(p0, i))) ++order;
      if (i > 0) {
        for (Eigen::Index row : {p0, p2, p6}) {
          if (v(row, i) < v(row, i - 1)) ++shape;
        }
      }
    }
  }
  return {order == 0 && shape == 0, std::to_string(r.grids.size()) + " curves, " + std::to_string(order) +
                                        " ordering violations, " + std::to_string(shape) + " decreasing steps"};
}

double rise(const ExperimentResult& r, const std::string& point) {
  const ResultGrid& g = grid_at(r, point);
  const auto row = g.values.row(row_of(g.rows, "p2"));
  return row.maxCoeff() / row(0) - 1.0;
}

Outcome criterion_3() {
  const std::string slow = "frame.frame_size=35__ue.doppler_hz=50";
  const std::string fast = "frame.frame_size=35__ue.doppler_hz=500";
  const ExperimentResult desk = frame_run(testing::desk_config(), {"35"}, {"50", "500"}, {"2"});
  const double rise_fast = rise(desk, fast);
  const double rise_slow = rise(desk, slow);
  const ExperimentResult full = frame_run(testing::full_config(), {"35"}, {"50", "500"}, {"2"});
  return {rise_fast >= 0.5 && rise_slow <= 0.3,
          "rise at 500 Hz " + percent(rise_fast) + " (need >= 50%), at 50 Hz " + percent(rise_slow) +
              " (need <= 30%); unreduced array: 500 Hz " + percent(rise(full, fast)) + ", 50 Hz " +
              percent(rise(full, slow))};
}

// ---- 4: closed forms against quadrature ------------------------------------

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

Outcome criterion_4() {
  std::mt19937_64 gen(4242);
  auto u = [&gen](double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); };
  const double t_sym = 51e-6;
  const double spacing = 20e3;
  double worst_t = 0.0;
  double worst_f = 0.0;
  for (int c = 0; c < 20; ++c) {
    ClusterSet cl;
    const int n = 1 + static_cast<int>(gen() % 4);
    for (int k = 0; k < n; ++k) {
      cl.angles.push_back(u(-1.2, 1.2));
      cl.dopplers.push_back(u(-1500.0, 1500.0));
      cl.ranges.push_back(u(10.0, 600.0));
    }
    cl.angular_spread = u(0.01, 0.15);
    cl.delay_spread = std::pow(10.0, u(-9.0, -7.3));
    cl.coherent_symbols = std::pow(10.0, u(0.5, 3.3));
    cl.validate();
    worst_t = std::max(worst_t, max_abs(doppler_covariance(cl, 20, t_sym) -
                                        testing::doppler_covariance_by_quadrature(cl, 20, t_sym)));
    worst_f = std::max(worst_f, max_abs(frequency_covariance(cl, {}, 20, spacing).coherent -
                                        testing::coherent_frequency_covariance_by_quadrature(cl, 20, spacing)));
  }
  return {worst_t <= 1e-6 && worst_f <= 1e-6,
          "largest entry error Doppler " + fmt(worst_t, 3) + ", frequency " + fmt(worst_f, 3) + ", limit 1e-6"};
}

// ---- 5: clutter covariance recovery ----------------------------------------

Outcome criterion_5() {
  ExperimentSpec spec;
  spec.id = "clutter-nmse-sweep";
  spec.base = testing::desk_config({{"run.monte_carlo", "15"}});
  spec.seeds = {spec.base.seed};
  std::vector<std::string> chi;
  for (int k = 0; k < 8; ++k) chi.push_back(fmt(-10.0 + 20.0 * k / 7.0, 17));
  spec.sweeps = {{"clutter.diffuse_power_db", chi}};
  const ExperimentResult r = run_clutter_nmse_sweep(spec);
  const RMatrix& v = r.grids.front().grid.values;
  const double space = v.col(0).maxCoeff();
  const double time = v.col(1).maxCoeff();
  int drops = 0;
  for (Eigen::Index k = 1; k < v.rows(); ++k) {
    if (v(k, 2) < v(k - 1, 2)) ++drops;
  }
  const bool rising = v(v.rows() - 1, 2) > v(0, 2);
  std::string freq;
  for (Eigen::Index k = 0; k < v.rows(); ++k) freq += (k ? " " : "") + fmt(v(k, 2), 3);
  return {space <= -14.0 && time <= -14.0 && drops <= 1 && rising,
          "worst space " + fmt(space) + " dB, time " + fmt(time) + " dB (limit -14); frequency [" + freq + "] dB, " +
              std::to_string(drops) + " decreasing step(s), one allowed"};
}

// ---- 6: whitening with the true covariances -------------------------------

Outcome criterion_6() {
  const ScenarioConfig cfg = testing::desk_config();
  const CovarianceModel model = build_covariance_model(cfg);
  const double noise = cfg.radar_noise_per_subcarrier();
  const Whitener w = make_whitener(model.b_sp, model.b_t, model.b_f.total(), model.texture, noise, cfg.tol);
  const ClutterSampler sampler(model, cfg.tol);
  CMatrix r_t = CMatrix::Zero(cfg.slots, cfg.slots);
  CMatrix r_f = CMatrix::Zero(cfg.subcarriers, cfg.subcarriers);
  const int cubes = 50;
  for (int c = 0; c < cubes; ++c) {
    Rng rng = Rng::substream(cfg.seed, 6000 + static_cast<std::uint64_t>(c));
    Tensor3 y = sampler.draw(rng);
    y += rng.complex_normal_cube(y.dims(), noise);
    const Tensor3 white = whiten_cube(y, w);
    r_t += sample_cov_time(white, 0.0);
    r_f += sample_cov_freq(white, 0.0);
  }
  r_t /= static_cast<double>(cubes);
  r_f /= static_cast<double>(cubes);
  const double dt = std::sqrt(relative_frobenius_sq(r_t, CMatrix::Identity(cfg.slots, cfg.slots)));
  const double df = std::sqrt(relative_frobenius_sq(r_f, CMatrix::Identity(cfg.subcarriers, cfg.subcarriers)));
  return {dt <= 0.1 && df <= 0.1,
          "relative Frobenius distance to identity: time " + fmt(dt, 3) + ", frequency " + fmt(df, 3) + ", limit 0.1"};
}

// ---- 7: end-to-end target recovery -----------------------------------------

bool near_cell(Eigen::Index r, Eigen::Index c, const testing::MapCell& t) {
  return std::abs(r - t.range_bin) <= 1 && std::abs(c - t.angle_cell) <= 1;
}

Outcome criterion_7() {
  const ScenarioConfig cfg = testing::desk_config();
  const CovarianceModel model = build_covariance_model(cfg);
  const RadarSimulation sim = simulate_radar(cfg, model, cfg.seed);
  const int stream = cfg.streams() - 1;
  const RadarMaps truth = run_radar_pipeline(sim.y, sim.x, cfg, WhiteningMode::truth, model, {stream}).maps.front();
  const RadarMaps none = run_radar_pipeline(sim.y, sim.x, cfg, WhiteningMode::none, model, {stream}).maps.front();

  std::vector<testing::MapCell> cells;
  for (const auto& t : sim.targets) cells.push_back(testing::truth_cell(t, truth.axes));

  // The strongest peaks of the map, one per target, with neighbouring range
  // bins suppressed between picks.
  RMatrix ra = truth.ra.values;
  std::vector<bool> found(cells.size(), false);
  std::ostringstream ra_text;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    ra.maxCoeff(&r, &c);
    ra_text << (k ? ", " : "") << "(" << fmt(truth.axes.range(r)) << " m, " << fmt(truth.axes.angle(c) * 180.0 / kPi)
            << " deg)";
    for (std::size_t t = 0; t < cells.size(); ++t) {
      if (near_cell(r, c, cells[t])) found[t] = true;
    }
    for (Eigen::Index rr = std::max<Eigen::Index>(0, r - 4); rr <= std::min<Eigen::Index>(ra.rows() - 1, r + 4); ++rr)
      ra.row(rr).setZero();
  }
  const bool ra_ok = std::all_of(found.begin(), found.end(), [](bool b) { return b; });

  bool rv_ok = true;
  std::ostringstream rv_text;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const RVector col = truth.rv.col(cells[t].range_bin);
    Eigen::Index j = 0;
    col.maxCoeff(&j);
    const double centre = lobe_centre(col, j);
    const double truth_row = cfg.slots_padded / 2 + sim.targets[t].velocity / truth.axes.velocity_step;
    rv_ok = rv_ok && std::abs(centre - truth_row) <= 1.0;
    rv_text << (t ? ", " : "") << fmt((centre - cfg.slots_padded / 2) * truth.axes.velocity_step) << " m/s (true "
            << fmt(sim.targets[t].velocity) << ")";
  }

  const RMatrix post = postprocess_map(truth.ra.values, {cfg.sv_fraction, 0.0, true});
  const double ratio = testing::peak_to_ridge_db(post, cells);

  Eigen::Index r0 = 0;
  Eigen::Index c0 = 0;
  none.ra.values.maxCoeff(&r0, &c0);
  bool none_hits = false;
  for (const auto& c : cells) none_hits = none_hits || near_cell(r0, c0, c);

  return {ra_ok && rv_ok && ratio >= 10.0 && !none_hits,
          "RA peaks " + ra_text.str() + (ra_ok ? " on" : " NOT on") + " targets; RV " + rv_text.str() +
              (rv_ok ? "" : " outside one bin") + "; peak to ridge " + fmt(ratio, 3) +
              " dB (need >= 10); unwhitened maximum at (" + fmt(none.axes.range(r0)) + " m, " +
              fmt(none.axes.angle(c0) * 180.0 / kPi) + " deg)" + (none_hits ? " is a target" : " is not a target")};
}

// ---- 8: null-space sensing precoder ----------------------------------------

Outcome criterion_8() {
  const ScenarioConfig cfg = testing::full_config();
  const CovarianceModel model = build_covariance_model(cfg);
  const std::vector<double> sweep = beamsweep_angles(cfg.sweep_start, cfg.sweep_end, 256, cfg.sweep_uniform_in_sine);
  double worst = 0.0;
  int degenerate = 0;
  for (int trial = 0; trial < 4; ++trial) {
    Rng rng = Rng::substream(cfg.seed, 800 + static_cast<std::uint64_t>(trial));
    CMatrix h(cfg.comm_streams(), cfg.bs_antennas);
    for (int k = 0; k < cfg.ues; ++k) {
      // Correlated channels on even trials, i.i.d. on odd ones.
      h.middleRows(k * cfg.ue_antennas, cfg.ue_antennas) =
          trial % 2 == 0 ? sample_ue_channel_series(cfg, model.c_k, {0}, rng).matrix(0, cfg.ue_antennas)
                         : rng.complex_normal_matrix(cfg.ue_antennas, cfg.bs_antennas);
    }
    const double h_norm = Eigen::JacobiSVD<CMatrix>(h).singularValues()(0);
    for (double theta : sweep) {
      const SensingBeam beam = sensing_precoder(h, theta, cfg.bs_antennas);
      if (beam.degenerate) ++degenerate;
      worst = std::max(worst, (h * beam.f).norm() / h_norm);
    }
  }
  return {worst <= 1e-9 && degenerate == 0, "largest residual " + fmt(worst, 3) + " over 4 x 256 beams, " +
                                                std::to_string(degenerate) + " degenerate, limit 1e-9"};
}

// ---- 9: UE SNR bookkeeping ---------------------------------------------------

Outcome criterion_9() {
  double worst = 0.0;
  std::string values;
  for (const char* gamma : {"0.05", "0.5", "0.95"}) {
    const ScenarioConfig cfg = testing::full_config({{"power.tradeoff", gamma}});
    const double snr = ue_snr_db(cfg);
    const double expected = 21.0 + 10.0 * std::log10(std::stod(gamma));
    worst = std::max(worst, std::abs(snr - expected));
    values += std::string(values.empty() ? "" : ", ") + "gamma " + gamma + ": " + fmt(snr, 6) + " dB vs " +
              fmt(expected, 6);
  }
  return {worst <= 0.01, values + "; largest gap " + fmt(worst, 4) + " dB, limit 0.01"};
}

// ---- 10: determinism --------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome criterion_10() {
  const ScenarioConfig tiny = testing::desk_config({{"array.bs_antennas", "8"},
                                                    {"ofdm.slots", "32"},
                                                    {"ofdm.subcarriers", "60"},
                                                    {"ofdm.slots_padded", "32"},
                                                    {"ofdm.subcarriers_padded", "64"},
                                                    {"radar.angle_grid", "128"},
                                                    {"radar.doppler_grid", "128"},
                                                    {"radar.range_grid", "128"},
                                                    {"run.monte_carlo", "2"}});
  std::vector<ExperimentSpec> specs(4);
  specs[0].id = "nmse-surface";
  specs[0].sweeps = {{"frame.frame_size", {"0", "10"}}, {"frame.past_pilots", {"0", "2"}}, {"power.tradeoff", {"0.5"}}};
  specs[1].id = "nmse-frame";
  specs[1].sweeps = {{"frame.frame_size", {"10"}}, {"ue.doppler_hz", {"100"}}, {"frame.past_pilots", {"0", "2"}}};
  specs[2].id = "clutter-nmse-sweep";
  specs[2].sweeps = {{"clutter.diffuse_power_db", {"-10", "10"}}};
  specs[3].id = "radar-maps";
  specs[3].sweeps = {{"power.tradeoff", {"0.5"}}};

  const fs::path root = fs::temp_directory_path() /
                        ("isac-acceptance-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  int files = 0;
  int mismatched = 0;
  for (auto& spec : specs) {
    spec.base = tiny;
    spec.seeds = {tiny.seed};
    std::vector<std::vector<std::string>> written;
    for (const char* run : {"a", "b"}) {
      spec.out_dir = (root / run / spec.id).string();
      written.push_back(write_experiment(spec, run_experiment(spec)));
    }
    for (std::size_t k = 0; k < written[0].size(); ++k) {
      ++files;
      const fs::path a = written[0][k];
      const fs::path b = root / "b" / spec.id / a.filename();
      if (k >= written[1].size() || slurp(a) != slurp(b)) ++mismatched;
    }
    if (written[0].size() != written[1].size()) ++mismatched;
  }
  fs::remove_all(root);
  return {files > 0 && mismatched == 0,
          std::to_string(files) + " files from four experiments, " + std::to_string(mismatched) + " differing"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  int only = 0;
  app.add_option("--only", only, "Run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<Outcome()>> checks = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                        criterion_5, criterion_6, criterion_7, criterion_8,
                                                        criterion_9, criterion_10};
  int failed = 0;
  for (int n = 1; n <= 10; ++n) {
    if (only != 0 && n != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[static_cast<std::size_t>(n - 1)]();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << n << ": " << (o.pass ? "PASS" : "FAIL") << " " << o.detail << " [" << fmt(secs, 3)
              << " s]" << std::endl;
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
