#include "cptv/harness/cli.hpp"
#include "cptv/oco/regret.hpp"
#include "cptv/reference/sampling.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

using namespace cptv;
namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "cptv");
  std::ostringstream out, err;
  const int code = harness::run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("cptv_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  static std::string tiny_config(double eta) {
    nlohmann::json j = {
        {"problem", {{"samples", {{"interior", 30}, {"boundary", 6}, {"initial", 6}}}}},
        {"grid", {{"nx", 41}, {"nt", 30}}},
        {"network", {{"hidden", {5}}}},
        {"track", {{"knots", 5}}},
        {"online", {{"eta", eta}, {"batches", 2}, {"epochs", 1}}},
        {"optimizer", {{"steps", 15}}},
        {"extraction", {{"refit", {{"steps", 5}}}}},
    };
    return j.dump(2);
  }

  fs::path dir_;
};

TEST_F(CliTest, NoArgumentsIsUsageError) {
  const auto r = run({});
  EXPECT_EQ(r.code, 1);
}

TEST_F(CliTest, UnknownSubcommandPrintsUsage) {
  const auto r = run({"frobnicate"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE((r.out + r.err).find("generate"), std::string::npos);
}

TEST_F(CliTest, MalformedConfigIsConfigError) {
  const auto cfg = write("bad.json", "{\n  \"online\": {\"eta\": }\n}\n");
  const auto r = run({"train", "-c", cfg.string(), "-o", (dir_ / "run").string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("bad.json:2:"), std::string::npos) << r.err;
}

TEST_F(CliTest, UnknownConfigKeyIsConfigError) {
  const auto cfg = write("bad.json", "{\"track\": {\"nots\": 3}}");
  const auto r = run({"train", "-c", cfg.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("nots"), std::string::npos);
}

TEST_F(CliTest, GenerateWritesReference) {
  const auto cfg = write("grid.json", R"({"grid": {"nx": 21, "nt": 30}})");
  const auto csv = dir_ / "ref.csv";
  const auto r = run({"generate", "-c", cfg.string(), "-o", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sol = ref::read_solution_csv(csv);
  EXPECT_EQ(sol.x.size(), 21);
  EXPECT_EQ(sol.t.size(), 31);
}

TEST_F(CliTest, RegretCheckOnRandomStream) {
  const auto rec = oracle::random_stream(30, 1e-4, 5);
  const auto csv = dir_ / "weights.csv";
  oco::write_record_csv(rec, csv);
  const auto r = run({"regret-check", "-w", csv.string(), "--eta", "1e-4"});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("regret-check PASS"), std::string::npos);
}

TEST_F(CliTest, RegretCheckMissingFile) {
  EXPECT_EQ(run({"regret-check", "-w", (dir_ / "none.csv").string()}).code, 1);
}

TEST_F(CliTest, TrainEvaluateReportPipeline) {
  const auto cfg = write("tiny.json", tiny_config(0.5));
  const auto out = dir_ / "run";
  const auto r = run({"train", "-c", cfg.string(), "-o", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("learning rate outside tested range"), std::string::npos);
  for (const char* f : {"report.json", "model.json", "lambda_track.csv", "weights.csv", "mse_grid.csv"})
    EXPECT_TRUE(fs::exists(out / f)) << f;

  std::ifstream w(out / "weights.csv");
  std::string header;
  std::getline(w, header);
  EXPECT_EQ(header, "batch,L_f,L_s,V_lambda,w1,w2,w3,gamma");
  std::ifstream t(out / "lambda_track.csv");
  std::getline(t, header);
  EXPECT_EQ(header, "knot_time,lambda_right_value");

  const auto rc = run({"regret-check", "-w", (out / "weights.csv").string(), "--eta", "0.5"});
  EXPECT_EQ(rc.code, 0) << rc.out;

  const auto refcsv = dir_ / "ref.csv";
  ASSERT_EQ(run({"generate", "-c", cfg.string(), "-o", refcsv.string()}).code, 0);
  const auto metrics = dir_ / "metrics.json";
  const auto ev = run({"evaluate", "-m", (out / "model.json").string(), "-r", refcsv.string(), "-c", cfg.string(), "-o",
                       metrics.string()});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("solution_mse"), std::string::npos);
  EXPECT_TRUE(fs::exists(metrics));

  const auto rep = run({"report", "-r", out.string()});
  ASSERT_EQ(rep.code, 0) << rep.err;
  for (const char* f : {"lambda.svg", "weights.svg", "batch_losses.svg", "loss_curve.svg", "mse_grid.svg"}) {
    ASSERT_TRUE(fs::exists(out / f)) << f;
    std::stringstream s;
    s << std::ifstream(out / f).rdbuf();
    EXPECT_NE(s.str().find("<svg"), std::string::npos) << f;
    EXPECT_NE(s.str().find("</svg>"), std::string::npos) << f;
  }
}

TEST_F(CliTest, TrainWithDataFileRelativeToConfig) {
  ASSERT_EQ(run({"generate", "-c", write("g.json", tiny_config(1e-4)).string(), "-o", (dir_ / "u.csv").string()}).code,
            0);
  auto j = nlohmann::json::parse(tiny_config(1e-4));
  j["problem"]["data"] = "u.csv";
  const auto cfg = write("withdata.json", j.dump());
  const auto r = run({"train", "-c", cfg.string(), "-o", (dir_ / "run").string()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.err.find("warning"), std::string::npos);
}

}  // namespace
