#include "isac/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "isac/precoding.hpp"

#ifndef ISAC_VERSION
#define ISAC_VERSION "0.0.0"
#endif

namespace isac {

std::string library_version() { return ISAC_VERSION; }

// ---- scenario assembly ------------------------------------------------------

namespace {

int longest_lag(const ScenarioConfig& cfg) {
  const int spacing = cfg.frame_size + 1;
  return std::max(cfg.slots, (cfg.past_pilots + 1) * spacing + cfg.frame_size) + 1;
}

CovarianceModel ue_model(const ScenarioConfig& cfg) {
  CovarianceModel model;
  // H = sum a_rx a_tx^H, so the columns of H correlate as conj(E[a_tx a_tx^H]).
  model.c_tx = spatial_covariance(cfg.ue_tx_clusters, cfg.bs_antennas).conjugate();
  model.c_rx = spatial_covariance(cfg.ue_rx_clusters, cfg.ue_antennas);
  model.c_k = ue_covariance(model.c_tx, model.c_rx);
  model.zeta = temporal_corr_sequence(static_cast<std::size_t>(longest_lag(cfg)), cfg.ue_doppler, cfg.symbol_time());
  return model;
}

CMatrix unit_pilot_precoder(const ScenarioConfig& cfg, const CMatrix& eigen_beams, double theta) {
  CMatrix f(cfg.bs_antennas, cfg.streams());
  for (int k = 0; k < cfg.ues; ++k) f.middleCols(k * cfg.ue_antennas, cfg.ue_antennas) = eigen_beams;
  f.col(cfg.streams() - 1) = steering_angle(theta, cfg.bs_antennas) / std::sqrt(static_cast<double>(cfg.bs_antennas));
  return f;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_' || c == '=';
    out += keep ? c : '_';
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

}  // namespace

CovarianceModel build_covariance_model(const ScenarioConfig& cfg) {
  CovarianceModel model = ue_model(cfg);
  model.b_sp = spatial_covariance(cfg.clutter, cfg.bs_antennas);
  model.b_t = doppler_covariance(cfg.clutter, cfg.slots, cfg.symbol_time());
  model.b_f = frequency_covariance(cfg.clutter, cfg.diffuse, cfg.subcarriers, cfg.subcarrier_spacing);
  model.texture = cfg.clutter_texture;
  model.check(cfg.tol);
  return model;
}

EstimatorInputs estimator_inputs(const ScenarioConfig& cfg, const CovarianceModel& model) {
  EstimatorInputs in;
  in.c_k = model.c_k;
  in.zeta = model.zeta;
  in.gain = cfg.ue_gain;
  in.pilot_len = cfg.pilot_subcarriers;
  in.noise_var = cfg.ue_noise_per_subcarrier();
  in.ue_antennas = cfg.ue_antennas;
  in.tol = cfg.tol;
  return in;
}

CMatrix pilot_slot_precoder(const ScenarioConfig& cfg, const CovarianceModel& model, int slot) {
  const std::vector<double> sweep =
      beamsweep_angles(cfg.sweep_start, cfg.sweep_end, cfg.slots, cfg.sweep_uniform_in_sine);
  const int n = cfg.slots;
  const double theta = sweep[static_cast<std::size_t>(((slot % n) + n) % n)];
  const CMatrix f = unit_pilot_precoder(cfg, pilot_precoder(model.c_tx, cfg.ue_antennas, cfg.tol), theta);
  return f * allocate_powers(cfg).amplitudes.cast<cd>().asDiagonal();
}

PilotHistory analytic_history(const ScenarioConfig& cfg, const CovarianceModel& model, int newest_slot, int count) {
  if (count < 1) throw std::invalid_argument("analytic_history: count must be >= 1");
  PilotHistory h;
  h.spacing = cfg.frame_size + 1;
  for (int j = 0; j < count; ++j) {
    const int slot = newest_slot - j * h.spacing;
    h.obs.push_back({CVector(), pilot_slot_precoder(cfg, model, slot), slot});
  }
  return h;
}

std::vector<double> block_fading_curve(const ScenarioConfig& cfg, const CovarianceModel& model, int frame_size,
                                       int pilot_slot) {
  const ChannelEstimate est = mmse_estimate(analytic_history(cfg, model, pilot_slot, 1), estimator_inputs(cfg, model), 0);
  return std::vector<double>(static_cast<std::size_t>(frame_size + 1), est.nmse);
}

RadarSimulation simulate_radar(const ScenarioConfig& cfg, const CovarianceModel& model, std::uint64_t seed,
                               const RadarCubeParts& parts, bool keep_target_echo) {
  const int slots = cfg.slots;
  const int blocks = block_count(cfg.subcarriers, cfg.coherent_subcarriers);
  const int spacing = cfg.frame_size + 1;
  const int s_count = cfg.streams();
  const Eigen::Index m = cfg.bs_antennas;
  const PowerAllocation powers = allocate_powers(cfg);
  const std::vector<double> sweep = beamsweep_angles(cfg.sweep_start, cfg.sweep_end, slots, cfg.sweep_uniform_in_sine);
  const CMatrix eigen_beams = pilot_precoder(model.c_tx, cfg.ue_antennas, cfg.tol);
  const EstimatorInputs in = estimator_inputs(cfg, model);
  const double noise = cfg.ue_noise_per_subcarrier();

  CMatrix pilots_sum = CMatrix::Zero(s_count, cfg.pilot_subcarriers);
  std::vector<CMatrix> pilots;
  for (int k = 0; k < cfg.ues; ++k) {
    pilots.push_back(pilot_matrix(k, s_count, cfg.pilot_subcarriers));
    pilots_sum += pilots.back();
  }
  std::vector<int> pilot_slots;
  for (int i = 0; i < slots; ++i) {
    if (is_pilot_slot(i, cfg.frame_size)) pilot_slots.push_back(i);
  }

  RadarSimulation sim;
  sim.targets = make_targets(cfg);
  sim.schedule.slots = slots;
  sim.schedule.blocks = blocks;
  sim.schedule.coherent_subcarriers = cfg.coherent_subcarriers;
  sim.schedule.f.resize(static_cast<std::size_t>(slots * blocks));
  sim.schedule.amplitudes = powers.amplitudes;

  const std::vector<double> gains(static_cast<std::size_t>(cfg.ues), cfg.ue_gain);
  for (int b = 0; b < blocks; ++b) {
    std::vector<UEChannelSeries> channels;
    for (int k = 0; k < cfg.ues; ++k) {
      Rng rng = Rng::substream(seed, 1000 + static_cast<std::uint64_t>(b * cfg.ues + k));
      channels.push_back(sample_ue_channel_series(cfg, model.c_k, pilot_slots, rng));
    }
    Rng pilot_noise = Rng::substream(seed, 500000 + static_cast<std::uint64_t>(b));

    // obs[k][q]: despread observation of UE k at pilot q.
    std::vector<std::vector<PilotObservation>> obs(static_cast<std::size_t>(cfg.ues));
    for (std::size_t q = 0; q < pilot_slots.size(); ++q) {
      const int slot = pilot_slots[q];
      const CMatrix f = unit_pilot_precoder(cfg, eigen_beams, sweep[static_cast<std::size_t>(slot)]);
      sim.schedule.f[static_cast<std::size_t>(slot * blocks + b)] = f;
      const CMatrix fp = f * powers.amplitudes.cast<cd>().asDiagonal();
      for (int k = 0; k < cfg.ues; ++k) {
        const CMatrix h = channels[static_cast<std::size_t>(k)].matrix(static_cast<Eigen::Index>(q), cfg.ue_antennas);
        const CMatrix y = received_pilot(cfg.ue_gain, h, fp, pilots_sum, noise, pilot_noise);
        const CMatrix d = despread(y, pilots[static_cast<std::size_t>(k)], cfg.pilot_subcarriers);
        obs[static_cast<std::size_t>(k)].push_back({Eigen::Map<const CVector>(d.data(), d.size()), fp, slot});
      }
    }

    for (std::size_t q = 0; q < pilot_slots.size(); ++q) {
      const int first = pilot_slots[q] + 1;
      const int last = std::min(pilot_slots[q] + cfg.frame_size, slots - 1);
      if (first > last) continue;
      std::vector<CMatrix> h_hat;
      std::vector<CMatrix> xi_err;
      for (int k = 0; k < cfg.ues; ++k) {
        PilotHistory history;
        history.spacing = spacing;
        const auto& ok = obs[static_cast<std::size_t>(k)];
        for (int j = 0; j <= cfg.past_pilots && j <= static_cast<int>(q); ++j) history.obs.push_back(ok[q - j]);
        const ChannelEstimate est = mmse_estimate(history, in, 1);
        if (est.ridge_applied) ++sim.ridged_estimates;
        h_hat.push_back(Eigen::Map<const CMatrix>(est.h_hat.data(), cfg.ue_antennas, m));
        xi_err.push_back(est.xi_err);
      }
      const CMatrix w = mmse_precoder(h_hat, xi_err, gains, noise / powers.comm_per_element);
      CMatrix stacked(static_cast<Eigen::Index>(cfg.ues) * cfg.ue_antennas, m);
      for (int k = 0; k < cfg.ues; ++k) {
        stacked.middleRows(k * cfg.ue_antennas, cfg.ue_antennas) = cfg.ue_gain * h_hat[static_cast<std::size_t>(k)];
      }
      const CMatrix projector = null_space_projector(stacked);
      for (int i = first; i <= last; ++i) {
        const SensingBeam beam = sensing_precoder_with_projector(projector, sweep[static_cast<std::size_t>(i)]);
        if (beam.degenerate) ++sim.degenerate_beams;
        CMatrix f(m, s_count);
        f.leftCols(s_count - 1) = w;
        f.col(s_count - 1) = beam.f;
        sim.schedule.f[static_cast<std::size_t>(i * blocks + b)] = f;
      }
    }
  }

  Rng symbols = Rng::substream(seed, 2);
  sim.x = symbol_cube(cfg, symbols);
  const ClutterSampler clutter(model.b_sp, model.b_t, model.b_f.total(), model.texture, cfg.tol);
  Rng radar = Rng::substream(seed, 3);
  sim.y = received_radar_cube(cfg, sim.targets, sim.schedule, sim.x, &clutter, radar, parts);
  if (keep_target_echo) {
    Rng unused = Rng::substream(seed, 4);
    sim.target_echo = received_radar_cube(cfg, sim.targets, sim.schedule, sim.x, nullptr, unused, {true, false, false});
  }
  return sim;
}

// ---- experiment specs -------------------------------------------------------

void ExperimentSpec::validate() const {
  static const std::set<std::string> ids = {"nmse-surface", "nmse-frame", "clutter-nmse-sweep", "radar-maps"};
  if (!ids.count(id)) throw std::invalid_argument("unknown experiment '" + id + "'");
  for (const auto& axis : sweeps) {
    if (axis.values.empty()) throw std::invalid_argument("sweep over '" + axis.key + "' has no values");
    for (const auto& v : axis.values) (void)with_override(base, axis.key, v);
  }
}

namespace {

const SweepAxis* find_axis(const ExperimentSpec& spec, const std::string& key) {
  for (const auto& a : spec.sweeps) {
    if (a.key == key) return &a;
  }
  return nullptr;
}

std::vector<std::string> axis_values(const ExperimentSpec& spec, const std::string& key,
                                     std::vector<std::string> fallback) {
  const SweepAxis* a = find_axis(spec, key);
  return a != nullptr ? a->values : fallback;
}

std::vector<std::string> linspace_text(double lo, double hi, int n) {
  std::vector<std::string> out;
  for (int k = 0; k < n; ++k) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", lo + (hi - lo) * k / (n - 1));
    out.push_back(buf);
  }
  return out;
}

std::vector<double> as_numbers(const std::vector<std::string>& v) {
  std::vector<double> out;
  for (const auto& s : v) out.push_back(std::stod(s));
  return out;
}

struct SweepPoint {
  std::map<std::string, std::string> overrides;
  std::string label;  // key=value__key=value
};

// Cartesian product of every sweep axis not in `dedicated`; `fallback` is
// used when no such axis was given.
std::vector<SweepPoint> outer_points(const ExperimentSpec& spec, const std::set<std::string>& dedicated,
                                     const std::vector<SweepAxis>& fallback) {
  std::vector<SweepAxis> axes;
  for (const auto& a : spec.sweeps) {
    if (!dedicated.count(a.key)) axes.push_back(a);
  }
  if (axes.empty()) axes = fallback;
  std::vector<SweepPoint> points{SweepPoint{}};
  for (const auto& a : axes) {
    std::vector<SweepPoint> next;
    for (const auto& p : points) {
      for (const auto& v : a.values) {
        SweepPoint q = p;
        q.overrides[a.key] = v;
        q.label += (q.label.empty() ? "" : "__") + a.key + "=" + v;
        next.push_back(q);
      }
    }
    points = std::move(next);
  }
  return points;
}

std::vector<std::uint64_t> seeds_of(const ExperimentSpec& spec) {
  return spec.seeds.empty() ? std::vector<std::uint64_t>{spec.base.seed} : spec.seeds;
}

Provenance provenance_of(const ExperimentSpec& spec, const ScenarioConfig& cfg) {
  return {config_hash(cfg), seeds_of(spec), library_version()};
}

std::string file_name(const std::string& id, const std::vector<std::string>& parts) {
  std::string out = id;
  for (const auto& p : parts) {
    if (!p.empty()) out += "__" + p;
  }
  return sanitize(out) + ".grid";
}

int largest_integer(const std::vector<std::string>& values) {
  int out = 0;
  for (const auto& v : values) out = std::max(out, std::stoi(v));
  return out;
}

double nmse_db(const CMatrix& est, const CMatrix& truth) { return power_to_db(relative_frobenius_sq(est, truth)); }

}  // namespace

ExperimentResult run_nmse_surface(const ExperimentSpec& spec) {
  spec.validate();
  const auto deltas = axis_values(spec, "frame.frame_size", {"0", "5", "10", "15", "20", "25", "30", "35"});
  const auto pasts = axis_values(spec, "frame.past_pilots", {"0", "1", "2", "3", "4", "5", "6"});
  const auto points = outer_points(spec, {"frame.frame_size", "frame.past_pilots"},
                                   {{"power.tradeoff", {"0.05", "0.5", "0.95"}}});
  // Every cell ends at the same pilot slot, so that all cells share the
  // newest pilot's sweep beam and longer histories extend shorter ones.
  const int newest = largest_integer(pasts) * (largest_integer(deltas) + 1);
  ExperimentResult res;
  for (const auto& pt : points) {
    const ScenarioConfig base = with_overrides(spec.base, pt.overrides);
    ResultGrid g;
    g.rows = GridAxis::listed("frame_size", "slots", as_numbers(deltas));
    g.cols = GridAxis::listed("past_pilots", "pilots", as_numbers(pasts));
    g.quantity = "mean_nmse";
    g.unit = "1";
    g.values.resize(g.rows.size(), g.cols.size());
    for (std::size_t a = 0; a < deltas.size(); ++a) {
      for (std::size_t b = 0; b < pasts.size(); ++b) {
        const ScenarioConfig cfg =
            with_overrides(base, {{"frame.frame_size", deltas[a]}, {"frame.past_pilots", pasts[b]}});
        const CovarianceModel model = ue_model(cfg);
        const EstimatorInputs in = estimator_inputs(cfg, model);
        const int p = cfg.past_pilots;
        const PilotHistory h = analytic_history(cfg, model, newest, p + 1);
        g.values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = mean(nmse_curve(h, in, cfg.frame_size));
      }
    }
    g.provenance = provenance_of(spec, base);
    res.grids.push_back({file_name("nmse-surface", {pt.label}), pt.label, std::move(g)});
  }
  return res;
}

ExperimentResult run_nmse_frame(const ExperimentSpec& spec) {
  spec.validate();
  const auto deltas = axis_values(spec, "frame.frame_size", {"10", "35"});
  const auto dopplers = axis_values(spec, "ue.doppler_hz", {"50", "100", "500"});
  const auto pasts = axis_values(spec, "frame.past_pilots", {"0", "2", "6"});
  const auto points = outer_points(spec, {"frame.frame_size", "ue.doppler_hz", "frame.past_pilots"}, {});
  const int newest = largest_integer(pasts);
  ExperimentResult res;
  for (const auto& pt : points) {
    const ScenarioConfig base = with_overrides(spec.base, pt.overrides);
    for (const auto& delta : deltas) {
      for (const auto& fd : dopplers) {
        const ScenarioConfig cfg = with_overrides(base, {{"frame.frame_size", delta}, {"ue.doppler_hz", fd}});
        std::vector<std::string> labels;
        for (const auto& p : pasts) labels.push_back("p" + p);
        labels.push_back("block_fading");
        ResultGrid g;
        g.rows = GridAxis::labelled("curve", labels);
        g.cols = GridAxis::linear("slot_offset", "slots", 0.0, 1.0, cfg.frame_size + 1);
        g.quantity = "nmse";
        g.unit = "1";
        g.values.resize(g.rows.size(), g.cols.size());
        for (std::size_t r = 0; r < pasts.size(); ++r) {
          const ScenarioConfig c = with_override(cfg, "frame.past_pilots", pasts[r]);
          const CovarianceModel model = ue_model(c);
          const int p = c.past_pilots;
          const auto curve = nmse_curve(analytic_history(c, model, newest * (c.frame_size + 1), p + 1),
                                        estimator_inputs(c, model), c.frame_size);
          for (std::size_t i = 0; i < curve.size(); ++i) {
            g.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i)) = curve[i];
          }
        }
        const auto bf = block_fading_curve(cfg, ue_model(cfg), cfg.frame_size, newest * (cfg.frame_size + 1));
        for (std::size_t i = 0; i < bf.size(); ++i) {
          g.values(static_cast<Eigen::Index>(pasts.size()), static_cast<Eigen::Index>(i)) = bf[i];
        }
        g.provenance = provenance_of(spec, cfg);
        const std::string point = "frame.frame_size=" + delta + "__ue.doppler_hz=" + fd;
        const std::string label = pt.label.empty() ? point : pt.label + "__" + point;
        res.grids.push_back({file_name("nmse-frame", {label}), label, std::move(g)});
      }
    }
  }
  return res;
}

ExperimentResult run_clutter_nmse_sweep(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<SweepAxis> axes = spec.sweeps;
  if (axes.empty()) {
    axes = {{"clutter.coherence_bandwidth_hz", linspace_text(5e3, 5e5, 8)},
            {"clutter.diffuse_power_db", linspace_text(-10.0, 10.0, 8)},
            {"clutter.angular_spread_deg", linspace_text(2.0, 9.0, 8)},
            {"clutter.delay_spread_s", linspace_text(1e-9, 1e-7, 8)}};
  }
  ExperimentResult res;
  std::vector<std::uint64_t> cube_seeds;
  for (std::uint64_t s : seeds_of(spec)) {
    for (int c = 0; c < spec.base.monte_carlo; ++c) cube_seeds.push_back(mix_seed(s, static_cast<std::uint64_t>(c)));
  }
  for (const auto& axis : axes) {
    ResultGrid g;
    g.rows = GridAxis::listed(axis.key, "config", as_numbers(axis.values));
    g.cols = GridAxis::labelled("component", {"space", "time", "frequency", "frequency_sparse"});
    g.quantity = "nmse";
    g.unit = "dB";
    g.values.resize(g.rows.size(), 4);
    for (std::size_t r = 0; r < axis.values.size(); ++r) {
      const ScenarioConfig cfg = with_override(spec.base, axis.key, axis.values[r]);
      const CovarianceModel model = build_covariance_model(cfg);
      const double noise = cfg.radar_noise_per_subcarrier();
      CMatrix r_sp = CMatrix::Zero(cfg.bs_antennas, cfg.bs_antennas);
      CMatrix r_t = CMatrix::Zero(cfg.slots, cfg.slots);
      CMatrix r_f = CMatrix::Zero(cfg.subcarriers, cfg.subcarriers);
      for (std::uint64_t seed : cube_seeds) {
        RadarSimulation sim = simulate_radar(cfg, model, seed, {}, cfg.zero_targets_for_estimation);
        Tensor3 y = std::move(sim.y);
        if (cfg.zero_targets_for_estimation) y += sim.target_echo * cd(-1.0, 0.0);
        r_sp += sample_cov_space(y, noise);
        r_t += sample_cov_time(y, noise);
        r_f += sample_cov_freq(y, noise);
      }
      const double n = static_cast<double>(cube_seeds.size());
      const ClutterEstimate est = estimate_clutter_from_covariances(r_sp / n, r_t / n, r_f / n, cfg);
      if (est.under_resolved()) {
        res.warnings.push_back(axis.key + "=" + axis.values[r] + ": fewer clutter peaks than patches");
      }
      const auto row = static_cast<Eigen::Index>(r);
      g.values(row, 0) = nmse_db(est.b_sp, model.b_sp);
      g.values(row, 1) = nmse_db(est.b_t, model.b_t);
      g.values(row, 2) = nmse_db(est.b_f, model.b_f.total());
      g.values(row, 3) = nmse_db(est.b_f, model.b_f.coherent);
    }
    g.provenance = provenance_of(spec, spec.base);
    res.grids.push_back({file_name("clutter-nmse", {axis.key}), axis.key, std::move(g)});
  }
  return res;
}

namespace {

void add_map_grids(ExperimentResult& res, const ExperimentSpec& spec, const ScenarioConfig& cfg,
                   const RadarMaps& maps, WhiteningMode mode, const std::string& label) {
  const int n = cfg.angle_grid;
  const std::string stream = maps.stream == cfg.streams() - 1 ? "sensing" : "comm" + std::to_string(maps.stream);
  const std::string point = (label.empty() ? "" : label + "__") + "whitening=" + to_string(mode) + "__" + stream;
  const GridAxis range = GridAxis::linear("range", "m", 0.0, maps.axes.range_step, cfg.subcarriers_padded);
  const GridAxis angle = GridAxis::sine("angle", "rad", -1.0 + 1.0 / n, 2.0 / n, n);
  const GridAxis velocity = GridAxis::linear("velocity", "m/s", maps.axes.velocity(0), maps.axes.velocity_step,
                                             cfg.slots_padded);
  ResultGrid ra{range, angle, "ra_pseudospectrum", "1", maps.ra_post, provenance_of(spec, cfg)};
  ResultGrid rv{velocity, range, "rv_magnitude", "1", maps.rv_post, provenance_of(spec, cfg)};
  res.grids.push_back({file_name("radar-maps", {point, "ra"}), point + "__ra", std::move(ra)});
  res.grids.push_back({file_name("radar-maps", {point, "rv"}), point + "__rv", std::move(rv)});
}

}  // namespace

ExperimentResult run_radar_maps(const ExperimentSpec& spec) {
  spec.validate();
  std::vector<WhiteningMode> modes = spec.modes;
  if (modes.empty()) modes = {WhiteningMode::none, WhiteningMode::estimated, WhiteningMode::truth};
  const std::uint64_t seed = seeds_of(spec).front();
  ExperimentResult res;

  // Sensing-stream maps for every whitening mode at the configured tradeoff;
  // communication-stream maps over the tradeoff sweep.
  const auto gammas = outer_points(spec, {}, {{"power.tradeoff", {"0.05", "0.5", "0.95"}}});
  std::vector<SweepPoint> points{SweepPoint{}};
  if (!spec.sweeps.empty()) points = gammas;
  for (const auto& pt : points) {
    const ScenarioConfig cfg = with_overrides(spec.base, pt.overrides);
    const CovarianceModel model = build_covariance_model(cfg);
    const RadarSimulation sim = simulate_radar(cfg, model, seed, {}, cfg.zero_targets_for_estimation);
    Tensor3 est_cube;
    if (cfg.zero_targets_for_estimation) est_cube = sim.y + sim.target_echo * cd(-1.0, 0.0);
    for (WhiteningMode mode : modes) {
      const PipelineResult out = run_radar_pipeline(sim.y, sim.x, cfg, mode, model, {cfg.streams() - 1},
                                                    cfg.zero_targets_for_estimation ? &est_cube : nullptr);
      if (out.estimate.under_resolved()) res.warnings.push_back(pt.label + ": clutter estimate under-resolved");
      add_map_grids(res, spec, cfg, out.maps.front(), mode, pt.label);
    }
  }
  if (spec.sweeps.empty()) {
    const WhiteningMode mode = modes.back();
    for (const auto& pt : gammas) {
      const ScenarioConfig cfg = with_overrides(spec.base, pt.overrides);
      const CovarianceModel model = build_covariance_model(cfg);
      const RadarSimulation sim = simulate_radar(cfg, model, seed);
      const PipelineResult out = run_radar_pipeline(sim.y, sim.x, cfg, mode, model, {0});
      add_map_grids(res, spec, cfg, out.maps.front(), mode, pt.label);
    }
  }
  return res;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.id == "nmse-surface") return run_nmse_surface(spec);
  if (spec.id == "nmse-frame") return run_nmse_frame(spec);
  if (spec.id == "clutter-nmse-sweep") return run_clutter_nmse_sweep(spec);
  if (spec.id == "radar-maps") return run_radar_maps(spec);
  throw std::invalid_argument("unknown experiment '" + spec.id + "'");
}

std::vector<std::string> write_experiment(const ExperimentSpec& spec, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);
  std::vector<std::string> written;
  nlohmann::ordered_json files = nlohmann::ordered_json::array();
  for (const auto& g : result.grids) {
    const std::string path = (fs::path(spec.out_dir) / g.file).string();
    write_grid(path, g.grid);
    written.push_back(path);
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(g.grid.provenance.config_hash));
    files.push_back({{"file", g.file}, {"point", g.point}, {"quantity", g.grid.quantity}, {"config_hash", hash}});
  }
  nlohmann::ordered_json manifest;
  manifest["experiment"] = spec.id;
  manifest["version"] = library_version();
  char hash[24];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(spec.base)));
  manifest["config_hash"] = hash;
  manifest["seeds"] = seeds_of(spec);
  nlohmann::ordered_json sweeps = nlohmann::ordered_json::array();
  for (const auto& a : spec.sweeps) sweeps.push_back({{"key", a.key}, {"values", a.values}});
  manifest["sweeps"] = sweeps;
  manifest["files"] = files;
  manifest["warnings"] = result.warnings;
  manifest["config"] = canonical_text(spec.base);

  const std::string path = (fs::path(spec.out_dir) / "manifest.json").string();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << '\n';
  written.push_back(path);
  return written;
}

}  // namespace isac
