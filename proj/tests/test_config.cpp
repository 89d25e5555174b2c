#include "cptv/errors.hpp"
#include "cptv/harness/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

namespace {

using namespace cptv;
using harness::config_from_json;
using nlohmann::json;

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / name;
  std::ofstream(p) << text;
  return p;
}

std::string error_of(const std::filesystem::path& p) {
  try {
    (void)harness::load_config(p);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

TEST(Config, EmptyObjectGivesDefaults) {
  const auto c = config_from_json(json::object());
  EXPECT_EQ(c.track.knots, 100);
  EXPECT_EQ(c.online.eta, 1e-4);
  EXPECT_EQ(c.online.batches, 4);
  EXPECT_EQ(c.grid.nx, 401);
  EXPECT_EQ(c.grid.nt, 600);
  ASSERT_EQ(c.grid.lambda.size(), 3u);
  EXPECT_TRUE(c.validate().empty());
}

TEST(Config, UnknownKeysRejected) {
  EXPECT_THROW(config_from_json(json::parse(R"({"optimiser": {}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"online": {"etaa": 0.1}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"extraction": {"refit": {"stepz": 3}}})")), ConfigError);
}

TEST(Config, TypeErrorsRejected) {
  EXPECT_THROW(config_from_json(json::parse(R"({"online": {"batches": 2.5}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"track": {"knots": "many"}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"track": {"weighting": "flat"}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"seed": -3})")), ConfigError);
}

TEST(Config, InvalidValuesRejected) {
  EXPECT_THROW(config_from_json(json::parse(R"({"online": {"eta": 0}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"online": {"w0": [0.5, 0.5, 0.5]}})")), ConfigError);
  EXPECT_THROW(config_from_json(json::parse(R"({"network": {"hidden": []}})")), ConfigError);
}

TEST(Config, LambdaSpecForms) {
  const auto a = config_from_json(json::parse(R"({"grid": {"lambda": 0.5}})"));
  ASSERT_EQ(a.grid.lambda.size(), 1u);
  EXPECT_EQ(a.grid.lambda[0].value, 0.5);
  const auto b = config_from_json(json::parse(R"({"grid": {"lambda": [[0, 0.2], [0.5, 0.9]]}})"));
  ASSERT_EQ(b.grid.lambda.size(), 2u);
  EXPECT_EQ(b.grid.lambda[1].start, 0.5);
  EXPECT_THROW(config_from_json(json::parse(R"({"grid": {"lambda": [[0, 0.2, 1]]}})")), ConfigError);
}

TEST(Config, LearningRateWarning) {
  const auto c = config_from_json(json::parse(R"({"online": {"eta": 0.5}})"));
  const auto w = c.validate();
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("learning rate outside tested range"), std::string::npos);
}

TEST(Config, RoundTrip) {
  auto c = config_from_json(json::parse(
      R"({"online": {"eta": 2e-4, "epochs": 5}, "track": {"knots": 50, "weighting": "u_shape"},
          "extraction": {"threshold": 0.03, "refit": {"enabled": false}}, "seed": 7})"));
  const auto back = config_from_json(harness::config_to_json(c));
  EXPECT_EQ(harness::config_to_json(back), harness::config_to_json(c));
  EXPECT_EQ(back.online.epochs, 5);
  EXPECT_EQ(back.track.weighting, cp::EdgeWeighting::UShape);
  EXPECT_EQ(back.extraction.threshold.value_or(0.0), 0.03);
  EXPECT_FALSE(back.refit.enabled);
  EXPECT_EQ(back.seed, 7u);
}

TEST(LoadConfig, MalformedJsonReportsLine) {
  const auto p = write_temp("cptv_bad1.json", "{\n  \"online\": {\n    \"eta\": 1e-4,\n  }\n}\n");
  const std::string msg = error_of(p);
  EXPECT_NE(msg.find("cptv_bad1.json:4:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("malformed JSON"), std::string::npos) << msg;
  std::filesystem::remove(p);
}

TEST(LoadConfig, UnknownKeyReportsLine) {
  const auto p = write_temp("cptv_bad2.json", "{\n  \"online\": {\n    \"eta\": 1e-4,\n    \"bogus\": 1\n  }\n}\n");
  const std::string msg = error_of(p);
  EXPECT_NE(msg.find("cptv_bad2.json:4:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("bogus"), std::string::npos) << msg;
  std::filesystem::remove(p);
}

TEST(LoadConfig, MissingFile) {
  EXPECT_NE(error_of("/nonexistent/cptv.json").find("cannot open"), std::string::npos);
}

TEST(GridJson, AcceptsFullConfigOrBareGrid) {
  const auto a = harness::grid_from_json(json::parse(R"({"grid": {"nx": 51, "nt": 30}, "seed": 3})"));
  EXPECT_EQ(a.nx, 51);
  const auto b = harness::grid_from_json(json::parse(R"({"nx": 61, "nt": 30})"));
  EXPECT_EQ(b.nx, 61);
  EXPECT_EQ(harness::grid_from_json(harness::grid_to_json(b)).nt, 30);
}

}  // namespace
