#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "check.hpp"
#include "commands.hpp"
#include "idsq/cholesky.hpp"
#include "idsq/json_io.hpp"
#include "verify.hpp"

namespace idsq::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("idsq_cli_test_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const json& j) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << j.dump();
    return p.string();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "idsq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    out_.str("");
    err_.str("");
    return run_cli(static_cast<int>(argv.size()), argv.data(), out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

CovarianceModel precision_family_model(double delta, double epsilon) {
  const BlockMatrix p = scale_to_unit_spectral_radius(
      materialize({DeltaEpsilonFamily::Kind::Precision, {5.0, 4.0, 5.0, 4.0}, delta, epsilon}));
  return {inverse_spd(p.full()), 2, 2, 1.0};
}

TEST_F(CliTest, CheckIdentityIsCertifiedBySignSearch) {
  const std::string path = write("identity.json", to_json(CovarianceModel(SymMatrix::identity(4), 2, 2, 1.0)));
  EXPECT_EQ(run({"check", "--sigma", path, "--kmax", "8", "--mmax", "8"}), 0) << err_.str();
  const json v = json::parse(out_.str());
  EXPECT_EQ(v.at("status"), "certified_id");
  bool gb = false;
  for (const json& r : v.at("reasons"))
    if (r.at("criterion") == "griffiths_bapat") gb = r.at("holds").get<bool>();
  EXPECT_TRUE(gb);
}

TEST_F(CliTest, CheckPrecisionFamilyCertifiedByInverseCovarianceSign) {
  const Verdict v = check_model(precision_family_model(0.2, 0.6), {8, 8, default_a_grid()});
  EXPECT_EQ(v.status, Status::CertifiedID);
  bool gb = true, sign = false;
  for (const CriterionReport& r : v.reasons) {
    if (r.criterion == Criterion::GriffithsBapat) gb = r.holds;
    if (r.criterion == Criterion::InverseCovarianceSign) sign = r.holds;
  }
  EXPECT_FALSE(gb);
  EXPECT_TRUE(sign);
}

TEST_F(CliTest, CheckReferenceResolventIsUndetermined) {
  const std::string path = write("q.json", to_json(materialize(reference_family())));
  EXPECT_EQ(run({"check", "--q", path, "--kmax", "20", "--mmax", "20", "--format", "json"}), 2) << err_.str();
  const json v = json::parse(out_.str());
  EXPECT_EQ(v.at("status"), "undetermined");
  EXPECT_TRUE(v.at("negative_cell").is_null());
  EXPECT_GT(v.at("scan").at(0).at("min_value").get<double>(), 0.0);
}

TEST_F(CliTest, CheckShanbhagShapes) {
  const Verdict v = check_model({SymMatrix{{1.0, 0.3, 0.2}, {0.3, 1.0, 0.1}, {0.2, 0.1, 1.0}}, 2, 1, 1.0}, {6, 6, {1.0}});
  EXPECT_EQ(v.status, Status::CertifiedID);
  EXPECT_EQ(v.reasons.front().criterion, Criterion::Shanbhag);
  EXPECT_EQ(v.reasons.front().detail.at("blocks_swapped"), 1.0);
}

TEST_F(CliTest, CheckInputErrors) {
  EXPECT_EQ(run({"check", "--sigma", (dir_ / "missing.json").string()}), 1);
  const std::string bad = write("bad.json", json::parse(R"({"sigma": [[1, 0], [0, -1]], "n1": 1, "n2": 1, "a": 1})"));
  EXPECT_EQ(run({"check", "--sigma", bad}), 1);
  EXPECT_EQ(run({"check"}), 1);
  EXPECT_EQ(run({"nonsense"}), 1);
  const std::string ok = write("ok.json", to_json(CovarianceModel(SymMatrix::identity(4), 2, 2, 1.0)));
  EXPECT_EQ(run({"check", "--sigma", ok, "--a-grid", "10", "1"}), 1);
}

TEST_F(CliTest, NegativeCellRule) {
  EXPECT_TRUE(is_negative_cell(-2e-9, 1.0));
  EXPECT_FALSE(is_negative_cell(-5e-10, 1.0));
  EXPECT_FALSE(is_negative_cell(0.0, 0.0));
}

TEST_F(CliTest, ScanGridConfirmsNegativeCellsWithOracle) {
  // Indefinite input: B22 has a negative eigenvalue, so trace(B22) at (0, 1)
  // is already negative.
  const BlockMatrix q(SymMatrix{{0.0, 0.0, 1.0, 0.0}, {0.0, 0.0, 0.0, 1.0}, {1.0, 0.0, -1.0, 0.0}, {0.0, 1.0, 0.0, 0.0}}, 2);
  const ScanOutcome s = scan_grid(q, std::nullopt, 4, 4);
  ASSERT_TRUE(s.negative);
  EXPECT_EQ(s.negative->k, 0u);
  EXPECT_EQ(s.negative->m, 1u);
  EXPECT_LT(s.negative->value, 0.0);
  ASSERT_TRUE(s.negative->oracle_value);
  EXPECT_NEAR(*s.negative->oracle_value, s.negative->value, 1e-12);
}

TEST_F(CliTest, Figure1WritesFullPositiveGrid) {
  const std::string out = (dir_ / "fig.csv").string();
  EXPECT_EQ(run({"figure1", "--output", out}), 0) << err_.str();
  std::ifstream in(out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "k,m,value,log_value");
  int rows = 0;
  bool found_03 = false;
  const BlockMatrix q = figure1_matrix();
  while (std::getline(in, line)) {
    ++rows;
    unsigned k, m;
    double value, log_value;
    ASSERT_EQ(std::sscanf(line.c_str(), "%u,%u,%lf,%lf", &k, &m, &value, &log_value), 4) << line;
    EXPECT_GT(value, 0.0);
    EXPECT_TRUE(std::isfinite(log_value));
    if (k == 0 && m == 3) {
      found_03 = true;
      const double expected = power(q.b22(), 3).trace();
      EXPECT_NEAR(value, expected, 1e-14);
      EXPECT_NEAR(log_value, std::log(expected), 1e-14);
    }
  }
  EXPECT_EQ(rows, 61 * 61);
  EXPECT_TRUE(found_03);
}

TEST_F(CliTest, Figure1CsvLeavesLogEmptyForNonPositive) {
  const std::string csv = figure1_csv({{0, 0, 2.0}, {0, 1, -1.0}});
  EXPECT_NE(csv.find("0,1,-1,\n"), std::string::npos);
}

TEST_F(CliTest, SearchIsDeterministicAcrossThreads) {
  const std::string a = (dir_ / "a.json").string(), b = (dir_ / "b.json").string();
  EXPECT_EQ(run({"search", "--trials", "100", "--kmax", "30", "--mmax", "30", "--seed", "7", "--output", a}), 0);
  EXPECT_EQ(run({"search", "--trials", "100", "--kmax", "30", "--mmax", "30", "--seed", "7", "--threads", "3",
                 "--output", b}),
            0);
  std::ifstream fa(a), fb(b);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, sb);
  const json r = json::parse(sa);
  EXPECT_EQ(r.at("trials").size(), 100u);
  for (const json& t : r.at("trials"))
    if (t.at("skipped").get<bool>()) EXPECT_EQ(t.at("reason"), "word-trace condition holds");
  for (const json& row : r.at("family_sweep")) EXPECT_EQ(row.at("holds"), row.at("expected"));
}

TEST_F(CliTest, SearchConfigFile) {
  const std::string cfg = write("cfg.json", json::parse(R"({"kmax": 10, "mmax": 12, "trials": 5, "seed": 3})"));
  EXPECT_EQ(run({"search", "--config", cfg}), 0) << err_.str();
  EXPECT_EQ(json::parse(out_.str()).at("config").at("mmax"), 12);
  const std::string bad = write("bad.json", json::parse(R"({"a_grid": [10, 1]})"));
  EXPECT_EQ(run({"search", "--config", bad}), 1);
  const std::string zero = write("zero.json", json::parse(R"({"trials": 0})"));
  EXPECT_EQ(run({"search", "--config", zero}), 1);
}

TEST_F(CliTest, VerifyPassesAndFilters) {
  EXPECT_EQ(run({"verify", "--instances", "8"}), 0) << out_.str();
  EXPECT_TRUE(json::parse(out_.str()).at("passed").get<bool>());
  EXPECT_EQ(run({"verify", "--filter", "tracesum", "--instances", "8"}), 0);
  const json j = json::parse(out_.str());
  ASSERT_EQ(j.at("suites").size(), 1u);
  EXPECT_EQ(j.at("suites").at(0).at("name"), "tracesum");
  EXPECT_NE(run({"verify", "--filter", "nope"}), 0);
}

TEST_F(CliTest, VerifyCatchesCorruptedClosedForm) {
  VerifyKernels k;
  k.closed_3_3 = [](const BlockMatrix& q) {
    const Matrix a = q.b11(), b = q.b12(), c = q.b21(), d = q.b22();
    return (7.0 * power(a, 2) * b * power(d, 2) * c + 12.0 * a * b * c * b * d * c + 2.0 * power(b * c, 3)).trace();
  };
  VerifyOptions o;
  o.filter = "tracesum";
  o.instances = 8;
  const auto results = run_verify(o, k);
  ASSERT_EQ(results.size(), 1u);
  EXPECT_FALSE(results[0].passed());
  EXPECT_FALSE(verify_summary(results).at("passed").get<bool>());
}

TEST_F(CliTest, LaplaceCommand) {
  const std::string path = write("m.json", to_json(CovarianceModel(SymMatrix::identity(2), 1, 1, 1.0)));
  EXPECT_EQ(run({"laplace", "--sigma", path, "--samples", "100000", "--seed", "3"}), 0) << err_.str();
  const json j = json::parse(out_.str());
  EXPECT_NEAR(j.at("closed").get<double>(), 0.5, 1e-15);
  EXPECT_NEAR(j.at("series").at("value").get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j.at("monte_carlo").at("estimate").get<double>(), 0.5,
              4 * j.at("monte_carlo").at("standard_error").get<double>());
  EXPECT_EQ(run({"laplace", "--sigma", path, "--s1", "1.0"}), 1);
  EXPECT_EQ(run({"laplace", "--sigma", path, "--samples", "2000", "--format", "csv"}), 0);
  EXPECT_EQ(out_.str().rfind("s1,s2,closed,series", 0), 0u);
}

}  // namespace
}  // namespace idsq::cli
