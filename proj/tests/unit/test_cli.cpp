#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "hybridiq/json_io.hpp"

namespace hybridiq {
namespace {

namespace fs = std::filesystem;
using io::json;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(HYBRIDIQ_TEST_DATA) + "/" + name; }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("hybridiq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string tmp(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name) {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  ADD_FAILURE() << "missing column " << name;
  return 0;
}

TEST_F(CliTest, ValidateValidState) {
  const Outcome o = invoke({"validate", data("state_bell_cells.json")});
  EXPECT_EQ(o.code, cli::kOk) << o.err;
  const json report = json::parse(o.out);
  EXPECT_TRUE(report.at("pass").get<bool>());
  EXPECT_EQ(report.at("files")[0].at("kind"), "state");
}

TEST_F(CliTest, ValidateNotNormalized) {
  const Outcome o = invoke({"validate", data("state_trace_08.json")});
  EXPECT_EQ(o.code, cli::kViolation);
  const json file = json::parse(o.out).at("files")[0];
  EXPECT_EQ(file.at("error"), "NotNormalized");
  for (const json& c : file.at("checks"))
    if (c.at("name") == "normalization") EXPECT_NEAR(c.at("deviation").get<double>(), 0.2, 1e-15);
}

TEST_F(CliTest, ValidateMalformedAndMissing) {
  EXPECT_EQ(invoke({"validate", data("malformed.json")}).code, cli::kFailure);
  EXPECT_EQ(invoke({"validate", data("no_such_file.json")}).code, cli::kFailure);
}

TEST_F(CliTest, ValidateChannelsKernelsAndCsv) {
  EXPECT_EQ(invoke({"validate", data("swap_x_channel.json"), data("coin_channel.json"), data("kernel_swap.json")}).code,
            cli::kOk);
  const Outcome bad = invoke({"validate", data("incomplete_channel.json"), "--format", "csv"});
  EXPECT_EQ(bad.code, cli::kViolation);
  const auto rows = parse_csv(bad.out);
  ASSERT_GE(rows.size(), 2u);
  EXPECT_EQ(rows[1][column(rows[0], "check")], "completeness");
  EXPECT_NEAR(std::stod(rows[1][column(rows[0], "deviation")]), 0.1, 1e-15);
}

TEST_F(CliTest, EvolveIdentityKeepsState) {
  const std::string final_path = tmp("final.json");
  const std::string csv_path = tmp("metrics.csv");
  const Outcome o = invoke({"evolve", data("state_bell_cells.json"), data("identity_channel.json"), "--steps", "5",
                            "--out", final_path, "--metrics", csv_path});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  std::ifstream in(csv_path);
  const auto rows = parse_csv(std::string(std::istreambuf_iterator<char>(in), {}));
  ASSERT_EQ(rows.size(), 7u);
  const std::size_t d = column(rows[0], "distance_from_previous");
  for (std::size_t r = 1; r < rows.size(); ++r) EXPECT_LE(std::stod(rows[r][d]), 1e-12);
  const HybridState final_state = io::state_from_json(io::read_file(final_path));
  EXPECT_NEAR(final_state.mass(0)(0, 0).real(), 0.5, 1e-15);
}

TEST_F(CliTest, EvolveMixingDecreasesMutualInformation) {
  const Outcome o = invoke({"evolve", data("state_bell_cells.json"), data("mixing_channel.json"), "--steps", "8"});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  const auto rows = parse_csv(o.out);
  const std::size_t mi = column(rows[0], "mutual_information");
  EXPECT_NEAR(std::stod(rows[1][mi]), std::log(2.0), 1e-12);
  for (std::size_t r = 2; r < rows.size(); ++r) EXPECT_LE(std::stod(rows[r][mi]), std::stod(rows[r - 1][mi]) + 1e-8);
}

TEST_F(CliTest, EvolveReportsMismatchWithStep) {
  const Outcome o = invoke({"evolve", data("state_bell_cells.json"), data("identity_channel.json"),
                            data("three_cell_identity.json")});
  EXPECT_EQ(o.code, cli::kFailure);
  EXPECT_NE(o.err.find("SpaceMismatch"), std::string::npos) << o.err;
  EXPECT_NE(o.err.find("step 1, channel 1"), std::string::npos) << o.err;
}

TEST_F(CliTest, LoccBellScenarioEndsPpt) {
  const std::string channels = tmp("bell_channels");
  const Outcome o = invoke({"locc", data("bell_measurement.json"), "--rho", data("bell_rho.json"), "--emit-channels", channels});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  const json report = json::parse(o.out);
  EXPECT_TRUE(report.at("ppt").at("ppt").get<bool>());
  EXPECT_EQ(report.at("records").size(), 2u);
  const CMatrix lambda = io::matrix_from_json(report.at("lambda"));
  EXPECT_NEAR(lambda(0, 0).real(), 0.5, 1e-12);
  EXPECT_NEAR(std::abs(lambda(0, 3)), 0.0, 1e-12);

  // The emitted record-space pipeline reproduces the run and ends PPT.
  const Outcome e = invoke({"evolve", channels + "/initial_state.json", channels + "/round_1.json", "--steps", "1",
                            "--bipartite", "2x2", "--out", tmp("final.json")});
  ASSERT_EQ(e.code, cli::kOk) << e.err;
  const auto rows = parse_csv(e.out);
  EXPECT_EQ(rows[0].back(), "ppt");
  EXPECT_EQ(rows[1].back(), "false");
  EXPECT_EQ(rows[2].back(), "true");
}

TEST_F(CliTest, MetricsAndMonotonicity) {
  const Outcome o = invoke({"metrics", data("state_bell_cells.json"), "--channel", data("mixing_channel.json"), "--other",
                            data("state_bell_cells.json")});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  const json m = json::parse(o.out);
  EXPECT_NEAR(m.at("mutual_information").get<double>(), std::log(2.0), 1e-12);
  EXPECT_EQ(m.at("distance").get<double>(), 0.0);
  EXPECT_FALSE(m.at("monotonicity").at("violation").get<bool>());
  EXPECT_LE(m.at("monotonicity").at("I_after").get<double>(), m.at("monotonicity").at("I_before").get<double>());
}

TEST_F(CliTest, PropertiesExitCodes) {
  EXPECT_EQ(invoke({"properties", "axioms", "--trials", "1000", "--seed", "7"}).code, cli::kOk);
  EXPECT_EQ(invoke({"properties", "vieq", "--trials", "200"}).code, cli::kOk);
  const Outcome unknown = invoke({"properties", "entanglement"});
  EXPECT_EQ(unknown.code, cli::kFailure);
  EXPECT_NE(unknown.err.find("UnknownSuite"), std::string::npos);
}

TEST_F(CliTest, ReportsAreByteIdentical) {
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"properties", "locc", "--trials", "5", "--seed", "3", "--format", "csv"},
        std::vector<std::string>{"randgen", "channel", "--cells", "3", "--qdim", "2", "--seed", "9"},
        std::vector<std::string>{"randgen", "protocol", "--dims", "2x3", "--rounds", "3", "--seed", "9"}}) {
    const Outcome a = invoke(args);
    const Outcome b = invoke(args);
    EXPECT_EQ(a.code, cli::kOk) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

TEST_F(CliTest, RandgenOutputsValidate) {
  for (const std::string kind : {"state", "channel", "kernel", "protocol", "density"}) {
    const std::string path = tmp(kind + ".json");
    ASSERT_EQ(invoke({"randgen", kind, "--seed", "4", "--out", path}).code, cli::kOk) << kind;
    const Outcome v = invoke({"validate", path});
    EXPECT_EQ(v.code, cli::kOk) << kind << "\n" << v.out;
  }
  EXPECT_EQ(invoke({"randgen", "unicorn"}).code, cli::kFailure);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(invoke({}).code, cli::kFailure);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kFailure);
  EXPECT_EQ(invoke({"validate", data("state_bell_cells.json"), "--format", "xml"}).code, cli::kFailure);
  EXPECT_EQ(invoke({"validate", data("state_bell_cells.json"), "--tol", "-1"}).code, cli::kFailure);
  EXPECT_EQ(invoke({"--help"}).code, cli::kOk);
}

}  // namespace
}  // namespace hybridiq
