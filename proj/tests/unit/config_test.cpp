#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "isac/config.hpp"
#include "oracles.hpp"

namespace isac {
namespace {

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

TEST(Config, DefaultsConvertUnits) {
  const ScenarioConfig c = testing::full_config();
  EXPECT_EQ(c.bs_antennas, 32);
  EXPECT_EQ(c.streams(), 3);
  EXPECT_NEAR(c.ue_gain * c.ue_gain, 1e-14, 1e-28);
  EXPECT_NEAR(c.tx_power, std::pow(10.0, 0.2), 1e-12);
  EXPECT_NEAR(c.clutter.angles[0], -40.0 * kPi / 180.0, 1e-15);
  EXPECT_NEAR(c.symbol_time(), 51e-6, 1e-15);
  EXPECT_EQ(c.targets.size(), 2u);
  EXPECT_NEAR(c.targets[0].rcs, std::pow(10.0, 0.5), 1e-12);
  EXPECT_EQ(c.whitening, WhiteningMode::estimated);
  EXPECT_NEAR(c.ue_noise_per_subcarrier(), 1e-16 / 1000.0, 1e-30);
}

TEST(Config, UeClustersAreEvenlySpread) {
  const ScenarioConfig c = testing::full_config(
      {{"ue.cluster_count", "3"}, {"ue.cluster_center_deg", "10"}, {"ue.cluster_interval_deg", "20"}});
  ASSERT_EQ(c.ue_tx_clusters.size(), 3u);
  EXPECT_NEAR(c.ue_tx_clusters.angles[0], 0.0, 1e-15);
  EXPECT_NEAR(c.ue_tx_clusters.angles[2], 20.0 * kPi / 180.0, 1e-15);
}

TEST(Config, DeskScaleOverrides) {
  const ScenarioConfig c = testing::desk_config();
  EXPECT_EQ(c.bs_antennas, 16);
  EXPECT_EQ(c.slots, 256);
  EXPECT_EQ(c.subcarriers, 256);
}

TEST(Config, Errors) {
  EXPECT_THROW(testing::full_config({{"array.bogus", "1"}}), std::invalid_argument);
  EXPECT_THROW(testing::full_config({{"array.bs_antennas", "many"}}), std::invalid_argument);
  EXPECT_THROW(testing::full_config({{"power.tradeoff", "1.5"}}), std::invalid_argument);
  EXPECT_THROW(testing::full_config({{"ofdm.slots_padded", "10"}}), std::invalid_argument);
  EXPECT_THROW(testing::full_config({{"clutter.dopplers_hz", "0, 1"}}), std::invalid_argument);
  EXPECT_THROW(testing::full_config({{"radar.whitening", "partial"}}), std::invalid_argument);
  EXPECT_THROW(testing::full_config({{"target3.x_m", "10"}}), std::invalid_argument);  // incomplete section
  EXPECT_THROW(testing::full_config({{"run.seed", "-1"}}), std::invalid_argument);
}

TEST(Config, CustomTargetsReplaceDefaults) {
  const ScenarioConfig c = testing::full_config(
      {{"target7.x_m", "100"}, {"target7.y_m", "0"}, {"target7.rcs_dbsm", "0"}, {"target7.velocity_mps", "3"}});
  ASSERT_EQ(c.targets.size(), 1u);
  EXPECT_DOUBLE_EQ(c.targets[0].velocity, 3.0);
}

TEST(Config, OverrideRebuildsDerivedFields) {
  const ScenarioConfig base = testing::full_config();
  const ScenarioConfig c = with_override(base, "power.tradeoff", "0.2");
  EXPECT_DOUBLE_EQ(c.tradeoff, 0.2);
  EXPECT_NEAR(c.comm_power(), 0.2 * c.tx_power, 1e-15);
  EXPECT_NE(config_hash(c), config_hash(base));
  EXPECT_EQ(config_hash(with_override(c, "power.tradeoff", "0.5")), config_hash(base));
  EXPECT_THROW(with_override(base, "nope.key", "1"), std::invalid_argument);
}

TEST(Config, CanonicalTextRoundTripsThroughIni) {
  const ScenarioConfig base = testing::desk_config({{"ue.doppler_hz", "250"}});
  const auto path = temp_file("isac_config_roundtrip.ini", canonical_text(base));
  const ScenarioConfig back = load_config(path.string());
  EXPECT_EQ(canonical_text(back), canonical_text(base));
  EXPECT_EQ(config_hash(back), config_hash(base));
  EXPECT_DOUBLE_EQ(back.ue_doppler, 250.0);
  std::filesystem::remove(path);
}

TEST(Config, HashIsFnv1aOfCanonicalText) {
  const ScenarioConfig c = testing::full_config();
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : canonical_text(c)) h = (h ^ ch) * 1099511628211ULL;
  EXPECT_EQ(config_hash(c), h);
}

TEST(Config, IniErrors) {
  EXPECT_THROW(read_config_entries("/nonexistent/file.ini"), std::invalid_argument);
  const auto bad = temp_file("isac_config_bad.ini", "[array\nbs_antennas = 4\n");
  EXPECT_THROW(read_config_entries(bad.string()), std::invalid_argument);
  std::filesystem::remove(bad);
}

TEST(Config, DbHelpers) {
  EXPECT_DOUBLE_EQ(db_to_power(20.0), 100.0);
  EXPECT_NEAR(power_to_db(0.5), -3.0103, 1e-4);
  EXPECT_EQ(parse_whitening("true"), WhiteningMode::truth);
  EXPECT_EQ(to_string(WhiteningMode::none), "none");
}

}  // namespace
}  // namespace isac
