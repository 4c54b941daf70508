#include "isac/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace isac {

namespace {

constexpr double kDeg = kPi / 180.0;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw std::invalid_argument("config key '" + key + "': expected an integer, got '" + text + "'");
  }
  return value;
}

int parse_int(const std::string& key, const std::string& text) {
  const long long v = parse_integer(key, text);
  if (v < -2147483647LL || v > 2147483647LL) {
    throw std::invalid_argument("config key '" + key + "': integer out of range");
  }
  return static_cast<int>(v);
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw std::invalid_argument("config key '" + key + "': expected true/false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    out.push_back(parse_double(key, item));
  }
  return out;
}

std::vector<double> scaled(std::vector<double> v, double s) {
  for (auto& x : v) x *= s;
  return v;
}

// Evenly spaced cluster angles over [center - interval/2, center + interval/2].
std::vector<double> spread_angles(int count, double center, double interval) {
  if (count < 1) throw std::invalid_argument("cluster count must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (int n = 0; n < count; ++n) {
    const double frac = count == 1 ? 0.5 : static_cast<double>(n) / (count - 1);
    out[static_cast<std::size_t>(n)] = center - 0.5 * interval + frac * interval;
  }
  return out;
}

const std::vector<std::pair<std::string, std::string>> kDefaults = {
    {"array.bs_antennas", "32"},
    {"array.ue_antennas", "2"},
    {"array.ues", "1"},
    {"ofdm.subcarriers", "1000"},
    {"ofdm.slots", "1000"},
    {"ofdm.pilot_subcarriers", "3"},
    {"ofdm.coherent_subcarriers", "20"},
    {"ofdm.subcarrier_spacing_hz", "20000"},
    {"ofdm.cyclic_prefix_s", "1e-6"},
    {"ofdm.carrier_hz", "2e9"},
    {"ofdm.slots_padded", "3000"},
    {"ofdm.subcarriers_padded", "3000"},
    {"frame.frame_size", "10"},
    {"frame.past_pilots", "2"},
    {"ue.path_gain_db", "-140"},
    {"ue.doppler_hz", "100"},
    {"ue.cluster_count", "4"},
    {"ue.cluster_center_deg", "14.5"},
    {"ue.cluster_interval_deg", "9"},
    {"ue.angular_spread_deg", "1"},
    {"ue.rx_cluster_center_deg", "-20"},
    {"ue.rx_cluster_interval_deg", "60"},
    {"ue.rx_angular_spread_deg", "1"},
    {"clutter.angles_deg", "-40, -10, 20, 50"},
    {"clutter.dopplers_hz", "0, 200, -400, 700"},
    {"clutter.ranges_m", "50, 120, 300, 450"},
    {"clutter.angular_spread_deg", "2"},
    {"clutter.delay_spread_s", "1e-9"},
    {"clutter.coherent_symbols", "1000"},
    {"clutter.texture_db", "-133"},
    {"clutter.diffuse_decay", "0.9"},
    {"clutter.coherence_bandwidth_hz", "50000"},
    {"clutter.diffuse_power_db", "0"},
    {"power.tx_power_dbm", "32"},
    {"power.tradeoff", "0.5"},
    {"power.ue_noise_db", "-160"},
    {"power.radar_noise_db", "-160"},
    {"target1.x_m", "163.1"},
    {"target1.y_m", "-76.1"},
    {"target1.rcs_dbsm", "5"},
    {"target1.velocity_mps", "22"},
    {"target2.x_m", "213.0"},
    {"target2.y_m", "149.1"},
    {"target2.rcs_dbsm", "1"},
    {"target2.velocity_mps", "-18"},
    {"sweep.start_deg", "-60"},
    {"sweep.end_deg", "60"},
    {"sweep.uniform_in_sine", "true"},
    {"radar.angle_grid", "1024"},
    {"radar.doppler_grid", "1024"},
    {"radar.range_grid", "2048"},
    {"radar.clutter_signal_dim", "0"},
    {"radar.target_signal_dim", "0"},
    {"radar.peak_threshold_db", "6"},
    {"radar.zero_targets_for_estimation", "false"},
    {"radar.sv_fraction", "0.8"},
    {"radar.kaiser_beta", "3"},
    {"radar.whitening", "estimated"},
    {"run.monte_carlo", "5"},
    {"run.seed", "1"},
    {"tolerance.hermitian_rel", "1e-12"},
    {"tolerance.psd_floor_rel", "1e-10"},
};

const std::map<std::string, std::string> kDesk = {
    {"array.bs_antennas", "16"},
    {"ofdm.subcarriers", "256"},
    {"ofdm.slots", "256"},
    {"ofdm.slots_padded", "256"},
    {"ofdm.subcarriers_padded", "512"},
    {"run.monte_carlo", "5"},
};

bool is_target_section(const std::string& section) {
  if (section.rfind("target", 0) != 0 || section.size() == 6) return false;
  return std::all_of(section.begin() + 6, section.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool is_known_key(const std::string& key) {
  for (const auto& [k, v] : kDefaults) {
    if (k == key) return true;
  }
  const auto dot = key.find('.');
  if (dot == std::string::npos) return false;
  const std::string section = key.substr(0, dot);
  const std::string field = key.substr(dot + 1);
  return is_target_section(section) &&
         (field == "x_m" || field == "y_m" || field == "rcs_dbsm" || field == "velocity_mps");
}

}  // namespace

WhiteningMode parse_whitening(const std::string& s) {
  if (s == "none") return WhiteningMode::none;
  if (s == "estimated") return WhiteningMode::estimated;
  if (s == "true") return WhiteningMode::truth;
  throw std::invalid_argument("whitening mode must be none, estimated or true, got '" + s + "'");
}

std::string to_string(WhiteningMode mode) {
  switch (mode) {
    case WhiteningMode::none:
      return "none";
    case WhiteningMode::estimated:
      return "estimated";
    default:
      return "true";
  }
}

const std::vector<std::pair<std::string, std::string>>& default_entries() { return kDefaults; }

const std::map<std::string, std::string>& desk_scale_entries() { return kDesk; }

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw std::invalid_argument("invalid config: " + what);
  };
  require(bs_antennas >= 1, "array.bs_antennas must be >= 1");
  require(ue_antennas >= 1, "array.ue_antennas must be >= 1");
  require(ues >= 1, "array.ues must be >= 1");
  require(subcarriers >= 1 && slots >= 1, "ofdm.subcarriers and ofdm.slots must be >= 1");
  require(pilot_subcarriers >= streams() * ues, "ofdm.pilot_subcarriers must be >= streams * ues");
  require(coherent_subcarriers >= pilot_subcarriers, "ofdm.coherent_subcarriers must hold the pilot subcarriers");
  require(subcarrier_spacing > 0.0 && cyclic_prefix >= 0.0, "subcarrier spacing must be positive");
  require(symbol_time() > 0.0, "symbol duration must be positive");
  require(carrier > 0.0, "ofdm.carrier_hz must be positive");
  require(slots_padded >= slots, "ofdm.slots_padded must be >= ofdm.slots");
  require(subcarriers_padded >= subcarriers, "ofdm.subcarriers_padded must be >= ofdm.subcarriers");
  require(frame_size >= 0, "frame.frame_size must be >= 0");
  require(past_pilots >= 0, "frame.past_pilots must be >= 0");
  require(ue_gain > 0.0, "ue gain must be positive");
  require(ue_doppler >= 0.0, "ue.doppler_hz must be >= 0");
  ue_tx_clusters.validate();
  ue_rx_clusters.validate();
  clutter.validate();
  require(clutter.dopplers.size() == clutter.size() && clutter.ranges.size() == clutter.size(),
          "clutter angles, dopplers and ranges must have equal length");
  diffuse.validate();
  require(clutter_texture >= 0.0, "clutter texture must be >= 0");
  require(tx_power > 0.0, "power.tx_power_dbm must be finite");
  require(tradeoff >= 0.0 && tradeoff <= 1.0, "power.tradeoff must lie in [0, 1]");
  require(ue_noise > 0.0 && radar_noise >= 0.0, "noise powers must be positive");
  for (const auto& t : targets) {
    require(std::hypot(t.x, t.y) > 0.0, "target at the array origin");
    require(t.x > 0.0, "target behind the array (x must be positive)");
    require(t.rcs > 0.0, "target RCS must be positive");
  }
  require(sweep_start < sweep_end, "sweep.start_deg must be below sweep.end_deg");
  require(std::abs(sweep_start) < kPi / 2 && std::abs(sweep_end) < kPi / 2, "sweep sector must lie inside (-90, 90)");
  require(angle_grid >= 2 && doppler_grid >= 2 && range_grid >= 2, "search grids need >= 2 points");
  require(effective_clutter_dim() < bs_antennas, "clutter signal dimension must be below the antenna count");
  require(effective_clutter_dim() < slots && effective_clutter_dim() < subcarriers,
          "clutter signal dimension must be below the slot and subcarrier counts");
  require(targets.empty() || effective_target_dim() < bs_antennas,
          "target signal dimension must be below the antenna count");
  require(sv_fraction >= 0.0 && sv_fraction <= 1.0, "radar.sv_fraction must lie in [0, 1]");
  require(kaiser_beta >= 0.0, "radar.kaiser_beta must be >= 0");
  require(monte_carlo >= 1, "run.monte_carlo must be >= 1");
  require(tol.hermitian_rel > 0.0 && tol.psd_floor_rel > 0.0, "tolerances must be positive");
}

ScenarioConfig config_from_entries(const std::map<std::string, std::string>& given) {
  for (const auto& [key, value] : given) {
    if (!is_known_key(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  std::map<std::string, std::string> e;
  for (const auto& [k, v] : kDefaults) e[k] = v;
  // A config that names any target section replaces the default targets.
  const bool custom_targets = std::any_of(given.begin(), given.end(), [](const auto& kv) {
    return is_target_section(kv.first.substr(0, kv.first.find('.')));
  });
  if (custom_targets) {
    for (auto it = e.begin(); it != e.end();) {
      it = is_target_section(it->first.substr(0, it->first.find('.'))) ? e.erase(it) : std::next(it);
    }
  }
  for (const auto& [k, v] : given) e[k] = trim(v);

  auto get = [&](const std::string& key) -> const std::string& { return e.at(key); };
  auto num = [&](const std::string& key) { return parse_double(key, get(key)); };
  auto integer = [&](const std::string& key) { return parse_int(key, get(key)); };

  ScenarioConfig c;
  c.bs_antennas = integer("array.bs_antennas");
  c.ue_antennas = integer("array.ue_antennas");
  c.ues = integer("array.ues");
  c.subcarriers = integer("ofdm.subcarriers");
  c.slots = integer("ofdm.slots");
  c.pilot_subcarriers = integer("ofdm.pilot_subcarriers");
  c.coherent_subcarriers = integer("ofdm.coherent_subcarriers");
  c.subcarrier_spacing = num("ofdm.subcarrier_spacing_hz");
  c.cyclic_prefix = num("ofdm.cyclic_prefix_s");
  c.carrier = num("ofdm.carrier_hz");
  c.slots_padded = integer("ofdm.slots_padded");
  c.subcarriers_padded = integer("ofdm.subcarriers_padded");
  c.frame_size = integer("frame.frame_size");
  c.past_pilots = integer("frame.past_pilots");

  // Path gain is an amplitude: -70 dB -> 10^(-70/20).
  c.ue_gain = std::pow(10.0, num("ue.path_gain_db") / 20.0);  // amplitude from the power gain
  c.ue_doppler = num("ue.doppler_hz");
  const int n_ue = integer("ue.cluster_count");
  c.ue_tx_clusters.angles = spread_angles(n_ue, num("ue.cluster_center_deg") * kDeg, num("ue.cluster_interval_deg") * kDeg);
  c.ue_tx_clusters.angular_spread = num("ue.angular_spread_deg") * kDeg;
  c.ue_rx_clusters.angles =
      spread_angles(n_ue, num("ue.rx_cluster_center_deg") * kDeg, num("ue.rx_cluster_interval_deg") * kDeg);
  c.ue_rx_clusters.angular_spread = num("ue.rx_angular_spread_deg") * kDeg;

  c.clutter.angles = scaled(parse_list("clutter.angles_deg", get("clutter.angles_deg")), kDeg);
  c.clutter.dopplers = parse_list("clutter.dopplers_hz", get("clutter.dopplers_hz"));
  c.clutter.ranges = parse_list("clutter.ranges_m", get("clutter.ranges_m"));
  c.clutter.angular_spread = num("clutter.angular_spread_deg") * kDeg;
  c.clutter.delay_spread = num("clutter.delay_spread_s");
  c.clutter.coherent_symbols = num("clutter.coherent_symbols");
  c.clutter_texture = db_to_power(num("clutter.texture_db"));
  c.diffuse.decay_base = num("clutter.diffuse_decay");
  c.diffuse.coherence_bandwidth = num("clutter.coherence_bandwidth_hz");
  c.diffuse.power_ratio = db_to_power(num("clutter.diffuse_power_db"));

  c.tx_power = db_to_power(num("power.tx_power_dbm") - 30.0);
  c.tradeoff = num("power.tradeoff");
  c.ue_noise = db_to_power(num("power.ue_noise_db"));
  c.radar_noise = db_to_power(num("power.radar_noise_db"));

  std::vector<std::string> sections;
  for (const auto& [k, v] : e) {
    const std::string section = k.substr(0, k.find('.'));
    if (is_target_section(section) && std::find(sections.begin(), sections.end(), section) == sections.end()) {
      sections.push_back(section);
    }
  }
  std::sort(sections.begin(), sections.end(), [](const std::string& a, const std::string& b) {
    return std::stoi(a.substr(6)) < std::stoi(b.substr(6));
  });
  for (const auto& s : sections) {
    for (const char* field : {"x_m", "y_m", "rcs_dbsm", "velocity_mps"}) {
      if (!e.count(s + "." + field)) {
        throw std::invalid_argument("config section [" + s + "] is missing key '" + field + "'");
      }
    }
    TargetConfig t;
    t.x = num(s + ".x_m");
    t.y = num(s + ".y_m");
    t.rcs = db_to_power(num(s + ".rcs_dbsm"));
    t.velocity = num(s + ".velocity_mps");
    c.targets.push_back(t);
  }

  c.sweep_start = num("sweep.start_deg") * kDeg;
  c.sweep_end = num("sweep.end_deg") * kDeg;
  c.sweep_uniform_in_sine = parse_bool("sweep.uniform_in_sine", get("sweep.uniform_in_sine"));

  c.angle_grid = integer("radar.angle_grid");
  c.doppler_grid = integer("radar.doppler_grid");
  c.range_grid = integer("radar.range_grid");
  c.clutter_signal_dim = integer("radar.clutter_signal_dim");
  c.target_signal_dim = integer("radar.target_signal_dim");
  c.peak_threshold_db = num("radar.peak_threshold_db");
  c.zero_targets_for_estimation =
      parse_bool("radar.zero_targets_for_estimation", get("radar.zero_targets_for_estimation"));
  c.sv_fraction = num("radar.sv_fraction");
  c.kaiser_beta = num("radar.kaiser_beta");
  c.whitening = parse_whitening(get("radar.whitening"));

  c.monte_carlo = integer("run.monte_carlo");
  const long long seed = parse_integer("run.seed", get("run.seed"));
  if (seed < 0) throw std::invalid_argument("config key 'run.seed' must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.tol.hermitian_rel = num("tolerance.hermitian_rel");
  c.tol.psd_floor_rel = num("tolerance.psd_floor_rel");

  c.entries = std::move(e);
  c.validate();
  return c;
}

std::map<std::string, std::string> read_config_entries(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file '" + path + "'");
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& err) {
    throw std::invalid_argument("config file '" + path + "': " + err.message() + " (line " +
                                std::to_string(err.line()) + ")");
  }
  std::map<std::string, std::string> out;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw std::invalid_argument("config key '" + section + "' is outside any section");
    for (const auto& [key, value] : body) out[section + "." + key] = value.data();
  }
  return out;
}

ScenarioConfig load_config(const std::string& path) { return config_from_entries(read_config_entries(path)); }

ScenarioConfig with_overrides(const ScenarioConfig& base, const std::map<std::string, std::string>& overrides) {
  std::map<std::string, std::string> e = base.entries;
  for (const auto& [k, v] : overrides) {
    if (!is_known_key(k)) throw std::invalid_argument("unknown config key '" + k + "'");
    e[k] = v;
  }
  return config_from_entries(e);
}

ScenarioConfig with_override(const ScenarioConfig& base, const std::string& key, const std::string& value) {
  return with_overrides(base, {{key, value}});
}

std::string canonical_text(const ScenarioConfig& cfg) {
  std::string out;
  std::string current;
  for (const auto& [k, v] : cfg.entries) {
    const auto dot = k.find('.');
    const std::string section = k.substr(0, dot);
    if (section != current) {
      out += (out.empty() ? "[" : "\n[") + section + "]\n";
      current = section;
    }
    out += k.substr(dot + 1) + " = " + v + "\n";
  }
  return out;
}

std::uint64_t config_hash(const ScenarioConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical_text(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace isac
