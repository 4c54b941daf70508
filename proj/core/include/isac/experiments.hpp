#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "isac/config.hpp"
#include "isac/covariance.hpp"
#include "isac/estimation.hpp"
#include "isac/grid_io.hpp"
#include "isac/radar.hpp"
#include "isac/scenario.hpp"

namespace isac {

/// Covariances of the configured scenario (UE clusters and clutter patches).
CovarianceModel build_covariance_model(const ScenarioConfig& cfg);

EstimatorInputs estimator_inputs(const ScenarioConfig& cfg, const CovarianceModel& model);

/// Precoders F P (M_BS x S) used at a pilot slot: the eigen-beamformer for
/// every UE stream and the sweep beam of that slot for the sensing stream,
/// each column scaled by its amplitude.
CMatrix pilot_slot_precoder(const ScenarioConfig& cfg, const CovarianceModel& model, int slot);

/// Observation-free history of the `count` most recent pilots before or at
/// `newest_slot`, for analytic error covariances.
PilotHistory analytic_history(const ScenarioConfig& cfg, const CovarianceModel& model, int newest_slot, int count);

/// Block-fading reference: the single-pilot NMSE at `pilot_slot` itself,
/// repeated for every slot of the frame (the channel is taken as constant).
std::vector<double> block_fading_curve(const ScenarioConfig& cfg, const CovarianceModel& model, int frame_size,
                                       int pilot_slot = 0);

struct RadarSimulation {
  TargetSet targets;
  PrecoderSchedule schedule;
  Tensor3 x;
  Tensor3 y;
  Tensor3 target_echo;  // filled only when requested, for target-free estimation
  int degenerate_beams = 0;
  int ridged_estimates = 0;
};

/// One coherent processing interval: UE channels over the pilot slots of
/// every coherence block, MMSE estimates, per-frame MMSE and null-space
/// sensing precoders, symbols and the received radar cube.
RadarSimulation simulate_radar(const ScenarioConfig& cfg, const CovarianceModel& model, std::uint64_t seed,
                               const RadarCubeParts& parts = {}, bool keep_target_echo = false);

struct SweepAxis {
  std::string key;  // config key, e.g. "power.tradeoff"
  std::vector<std::string> values;
};

struct ExperimentSpec {
  std::string id;  // nmse-surface, nmse-frame, clutter-nmse-sweep, radar-maps
  ScenarioConfig base;
  std::vector<SweepAxis> sweeps;
  std::vector<std::uint64_t> seeds;
  std::vector<WhiteningMode> modes;  // radar-maps only; empty means all three
  std::string out_dir;

  /// Sweep keys must name config keys and accept every listed value.
  void validate() const;
};

struct NamedGrid {
  std::string file;   // relative to the output directory
  std::string point;  // human-readable sweep point
  ResultGrid grid;
};

struct ExperimentResult {
  std::vector<NamedGrid> grids;
  std::vector<std::string> warnings;
};

ExperimentResult run_nmse_surface(const ExperimentSpec& spec);
ExperimentResult run_nmse_frame(const ExperimentSpec& spec);
ExperimentResult run_clutter_nmse_sweep(const ExperimentSpec& spec);
ExperimentResult run_radar_maps(const ExperimentSpec& spec);
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes every grid, then manifest.json. Returns the written paths.
std::vector<std::string> write_experiment(const ExperimentSpec& spec, const ExperimentResult& result);

std::string library_version();

}  // namespace isac
