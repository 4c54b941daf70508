#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "isac/covariance.hpp"
#include "isac/linalg.hpp"

namespace isac {

struct TargetConfig {
  double x = 0.0;         // m
  double y = 0.0;         // m
  double rcs = 1.0;       // m^2
  double velocity = 0.0;  // radial, m/s; Doppler is 2 v / lambda
};

enum class WhiteningMode { none, estimated, truth };

WhiteningMode parse_whitening(const std::string& s);
std::string to_string(WhiteningMode mode);

/// Every physical and algorithmic parameter of one experiment, in linear
/// SI units. Values are converted from the dB / degree text form once at
/// load time. `entries` keeps the text form ("section.key" -> value) so that
/// sweeps can override a key and rebuild, and so that a run can be hashed.
struct ScenarioConfig {
  // Array and OFDM numerology.
  int bs_antennas = 32;
  int ue_antennas = 2;
  int ues = 1;
  int subcarriers = 1000;
  int slots = 1000;
  int pilot_subcarriers = 3;
  int coherent_subcarriers = 20;
  double subcarrier_spacing = 20e3;
  double cyclic_prefix = 1e-6;
  double carrier = 2e9;
  int slots_padded = 3000;
  int subcarriers_padded = 3000;

  // Frame structure: data slots between pilots and past pilots reused.
  int frame_size = 10;
  int past_pilots = 2;

  // Communication UE.
  double ue_gain = 1e-7;  // path amplitude alpha; the key holds alpha^2 in dB
  double ue_doppler = 100.0;
  ClusterSet ue_tx_clusters;
  ClusterSet ue_rx_clusters;

  // Clutter.
  ClusterSet clutter;
  DiffuseFreqParams diffuse;
  double clutter_texture = 5.011872336272714e-14;  // -133 dB

  // Powers; noise powers are totals over the band.
  double tx_power = 1.5848931924611136;  // W, 32 dBm
  double tradeoff = 0.5;
  double ue_noise = 1e-16;
  double radar_noise = 1e-16;

  std::vector<TargetConfig> targets;

  // Sensing beam sweep.
  double sweep_start = -kPi / 3;
  double sweep_end = kPi / 3;
  bool sweep_uniform_in_sine = true;

  // Radar processing.
  int angle_grid = 1024;
  int doppler_grid = 1024;
  int range_grid = 2048;
  int clutter_signal_dim = 0;  // 0 -> patch count
  int target_signal_dim = 0;   // 0 -> target count
  double peak_threshold_db = 6.0;
  bool zero_targets_for_estimation = false;
  double sv_fraction = 0.8;
  double kaiser_beta = 3.0;  // 0 disables the range window
  WhiteningMode whitening = WhiteningMode::estimated;

  // Experiment control.
  int monte_carlo = 5;
  std::uint64_t seed = 1;
  LinalgTolerances tol;

  std::map<std::string, std::string> entries;

  [[nodiscard]] double symbol_time() const { return 1.0 / subcarrier_spacing + cyclic_prefix; }
  [[nodiscard]] double wavelength() const { return kSpeedOfLight / carrier; }
  [[nodiscard]] int streams() const { return ues * ue_antennas + 1; }
  [[nodiscard]] int comm_streams() const { return ues * ue_antennas; }
  [[nodiscard]] double comm_power() const { return tradeoff * tx_power; }
  [[nodiscard]] double sensing_power() const { return (1.0 - tradeoff) * tx_power; }
  /// Noise variance per subcarrier and receive antenna.
  [[nodiscard]] double ue_noise_per_subcarrier() const { return ue_noise / subcarriers; }
  [[nodiscard]] double radar_noise_per_subcarrier() const { return radar_noise / subcarriers; }
  [[nodiscard]] int effective_clutter_dim() const {
    return clutter_signal_dim > 0 ? clutter_signal_dim : static_cast<int>(clutter.size());
  }
  [[nodiscard]] int effective_target_dim() const {
    return target_signal_dim > 0 ? target_signal_dim : static_cast<int>(targets.size());
  }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Known keys with their default text values, in file order.
const std::vector<std::pair<std::string, std::string>>& default_entries();

/// Overrides applied by `--scale desk`.
const std::map<std::string, std::string>& desk_scale_entries();

/// Builds a validated config from "section.key" text entries. Missing keys
/// take defaults; unknown keys, unparsable values and violated invariants
/// throw std::invalid_argument.
ScenarioConfig config_from_entries(const std::map<std::string, std::string>& entries);

/// Parses an INI file (sections mirror the entry prefixes).
std::map<std::string, std::string> read_config_entries(const std::string& path);
ScenarioConfig load_config(const std::string& path);

/// Copy of `base` with one key replaced and all derived fields rebuilt.
ScenarioConfig with_override(const ScenarioConfig& base, const std::string& key, const std::string& value);
ScenarioConfig with_overrides(const ScenarioConfig& base, const std::map<std::string, std::string>& overrides);

/// Canonical INI text of the full entry set, and its FNV-1a 64-bit hash.
std::string canonical_text(const ScenarioConfig& cfg);
std::uint64_t config_hash(const ScenarioConfig& cfg);

/// dB helpers used across the library.
inline double db_to_power(double db) { return std::pow(10.0, db / 10.0); }
inline double power_to_db(double p) { return 10.0 * std::log10(p); }

}  // namespace isac
