#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

#include "aircomp/config.hpp"
#include "aircomp/emit.hpp"
#include "aircomp/experiments.hpp"

namespace aircomp {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigDir = AIRCOMP_CONFIG_DIR;

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("aircomp_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  CliRun invoke(const std::string& args) {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string command = std::string("\"") + AIRCOMP_CLI_PATH + "\" " + args + " > \"" +
                                out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(command.c_str());
    CliRun result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
  }

  std::string quick() const { return "--config \"" + (kConfigDir / "quick.conf").string() + "\""; }

  fs::path dir_;
};

TEST_F(CliTest, SolvePrintsEveryAlgorithm) {
  const CliRun r = invoke("solve " + quick());
  ASSERT_EQ(r.exit_code, 0) << r.err;
  for (const char* name : {"direct-sdr", "direct-sca", "sdr-opt", "sca-opt"}) {
    EXPECT_NE(r.out.find(name), std::string::npos) << name;
  }
}

TEST_F(CliTest, SolveJsonMatchesSweepRecord) {
  const CliRun r = invoke("solve " + quick() + " --format json --antennas 8 --seed 5");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto document = nlohmann::json::parse(r.out);
  ASSERT_EQ(document["results"].size(), 4u);

  ExperimentConfig config = parse_config_file(kConfigDir / "quick.conf");
  config.master_seed = 5;
  config.sweep_values = {8};
  config.system.realizations = 1;
  const auto records = run_sweep(config);
  ASSERT_EQ(records.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& result = document["results"][i];
    EXPECT_EQ(result["algorithm"].get<std::string>(), records[i].algorithm);
    EXPECT_EQ(result["mse"].get<double>(), records[i].mse);
    EXPECT_EQ(result["status"].get<std::string>(), records[i].status);
  }
  EXPECT_EQ(document["channel_digest"].get<std::uint64_t>(), records[0].channel_digest);
}

TEST_F(CliTest, SweepWritesCsvAndRemovesPartialFile) {
  const fs::path output = dir_ / "records.csv";
  const CliRun r = invoke("sweep-antennas " + quick() + " --digest --jobs 2 --output \"" +
                    output.string() + "\"");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_FALSE(fs::exists(output.string() + ".partial"));
  const auto records = records_from_csv(slurp(output));
  ASSERT_EQ(records.size(), 2u * 2u * 4u);
  for (std::size_t i = 0; i < records.size(); i += 4) {
    for (std::size_t j = 1; j < 4; ++j) {
      EXPECT_EQ(records[i + j].channel_digest, records[i].channel_digest);
    }
  }
}

TEST_F(CliTest, SweepAggregateJson) {
  const CliRun r = invoke("sweep-antennas " + quick() + " --aggregate --format json --algorithms sdr-opt,sca-opt");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = nlohmann::json::parse(r.out);
  ASSERT_EQ(rows.size(), 4u);  // two algorithms at two antenna counts
  for (const auto& row : rows) {
    EXPECT_EQ(row["count_ok"].get<int>(), 2);
    EXPECT_GT(row["mse_mean"].get<double>(), 0.0);
  }
}

TEST_F(CliTest, SweepDevicesWithValues) {
  const CliRun r = invoke("sweep-devices " + quick() + " --values 2,3 --algorithms sdr-opt");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto records = records_from_csv(r.out);
  ASSERT_EQ(records.size(), 4u);
  EXPECT_EQ(records[0].devices, 2);
  EXPECT_EQ(records[3].devices, 3);
}

TEST_F(CliTest, SweepAxisMismatchIsConfigError) {
  const CliRun r = invoke("sweep-devices " + quick());
  EXPECT_NE(r.exit_code, 0);
  EXPECT_EQ(r.err.rfind("error: config: ", 0), 0u) << r.err;
}

TEST_F(CliTest, ValidatePasses) {
  const CliRun r = invoke("validate " + quick() + " --algorithms sca-opt --format json");
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto report = nlohmann::json::parse(r.out);
  EXPECT_TRUE(report["passed"].get<bool>());
  EXPECT_EQ(report["rows"].size(), 2u);
}

TEST_F(CliTest, UnknownConfigKeyIsOneLineError) {
  const fs::path config = dir_ / "bad.conf";
  std::ofstream(config) << "num_devices = 4\nsigma = -100\n";
  const CliRun r = invoke("solve --config \"" + config.string() + "\"");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error: config: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("noise_power_dbm"), std::string::npos);
  EXPECT_EQ(std::count(r.err.begin(), r.err.end(), '\n'), 1);
}

TEST_F(CliTest, UsageErrors) {
  CliRun r = invoke("frobnicate");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(r.err.rfind("error: usage: ", 0), 0u) << r.err;
  r = invoke("solve --format xml");
  EXPECT_EQ(r.exit_code, 2);
  r = invoke("solve " + quick() + " --algorithms sdr-opt,unknown");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error: config: ", 0), 0u) << r.err;
}

TEST_F(CliTest, UnwritableOutputIsIoError) {
  const CliRun r = invoke("solve " + quick() + " --algorithms sdr-opt --output /nonexistent-dir/x.txt");
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(r.err.rfind("error: io: ", 0), 0u) << r.err;
  EXPECT_NE(r.err.find("/nonexistent-dir/x.txt"), std::string::npos);
}

TEST_F(CliTest, HelpExitsCleanly) {
  const CliRun r = invoke("--help");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("sweep-antennas"), std::string::npos);
}

}  // namespace
}  // namespace aircomp
