// Copyright 2026 The dprp Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dprp/cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "json.hpp"

namespace dprp {
namespace {

using ::testing::HasSubstr;
namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result Call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = Dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string Slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  fs::path d = fs::path(::testing::TempDir()) / ("dprp_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::vector<std::string> Split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream s(line);
  std::string f;
  while (std::getline(s, f, ',')) out.push_back(f);
  return out;
}

double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TEST(CliTest, CalibrateMatchesProfile) {
  Result r = Call({"calibrate", "--eps", "1", "--delta", "1e-6", "--delta2", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::stringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  EXPECT_EQ(header,
            "epsilon,delta,sensitivity,sigma_optimal,sigma_classic,"
            "laplace_lambda");
  const auto f = Split(row);
  ASSERT_EQ(f.size(), 6u);
  const double sigma = std::stod(f[3]);
  // Gaussian privacy profile at the reported scale must equal delta.
  const double a = 1.0 / sigma;
  const double profile = Phi(a / 2 - 1 / a) - std::exp(1.0) * Phi(-a / 2 - 1 / a);
  EXPECT_NEAR(profile, 1e-6, 1e-12);
  EXPECT_NEAR(std::stod(f[4]), std::sqrt(2 * (std::log(1e6) + 1)), 1e-12);
  EXPECT_EQ(f[5], "1");
}

TEST(CliTest, ClassicColumnBlankWhenDeltaTooLarge) {
  Result r = Call({"calibrate", "--eps", "1", "--delta", "0.6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_THAT(r.out, HasSubstr(",,1\n"));
}

TEST(CliTest, UnknownFlagIsUsageError) {
  Result r = Call({"calibrate", "--eps", "1", "--bogus", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_THAT(r.err, HasSubstr("--bogus"));
  EXPECT_THAT(r.err, HasSubstr("Usage"));
}

TEST(CliTest, MissingSubcommandIsUsageError) {
  Result r = Call({});
  EXPECT_EQ(r.code, 1);
  EXPECT_THAT(r.err, HasSubstr("Usage"));
}

TEST(CliTest, HelpExitsZero) {
  Result r = Call({"privatize", "--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_THAT(r.out, HasSubstr("--variant"));
}

TEST(CliTest, AnalyticCartesianProduct) {
  Result r = Call({"analytic", "--fn", "rr_flip_probability", "--eps-prime",
                   "0,2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.rfind("eps-prime,value\n0,0.5\n2,", 0), 0u);
  const double v = std::stod(r.out.substr(r.out.rfind(',') + 1));
  EXPECT_DOUBLE_EQ(v, 1 / (std::exp(2.0) + 1));

  Result grid = Call({"analytic", "--fn", "p_plus_gaussian", "--r", "0.1,0.5",
                      "--p", "10,100"});
  ASSERT_EQ(grid.code, 0) << grid.err;
  EXPECT_EQ(std::count(grid.out.begin(), grid.out.end(), '\n'), 5);
}

TEST(CliTest, AnalyticValidation) {
  EXPECT_EQ(Call({"analytic", "--fn", "p_plus_gausian", "--r", "1"}).code, 1);
  Result missing = Call({"analytic", "--fn", "p_plus_gaussian", "--r", "0.1"});
  EXPECT_EQ(missing.code, 1);
  EXPECT_THAT(missing.err, HasSubstr("--p"));
  EXPECT_EQ(Call({"analytic", "--fn", "p_plus_gaussian", "--r", "0.1", "--p",
                  "2.5"})
                .code,
            1);
}

TEST(CliTest, ClassicDeltaOutOfRange) {
  const fs::path d = Scratch("classic");
  std::ofstream(d / "x.csv") << "0.5,0.1\n0.2,0.3\n";
  Result r = Call({"--out", (d / "o").string(), "privatize", "--input",
                   (d / "x.csv").string(), "--variant", "rp_g", "--eps", "1",
                   "--delta", "0.6", "--k", "4"});
  EXPECT_EQ(r.code, 1);
  EXPECT_THAT(r.err, HasSubstr("delta out of range for classic mechanism"));
}

TEST(CliTest, PrivatizeRequiresOut) {
  const fs::path d = Scratch("noout");
  std::ofstream(d / "x.csv") << "0.5,0.1\n";
  EXPECT_EQ(Call({"privatize", "--input", (d / "x.csv").string(), "--variant",
                  "rp_g_opt", "--eps", "1"})
                .code,
            1);
}

TEST(CliTest, OutOfBoundInputRejected) {
  const fs::path d = Scratch("bound");
  std::ofstream(d / "x.csv") << "0.5,1.5\n";
  Result r = Call({"--out", (d / "o").string(), "privatize", "--input",
                   (d / "x.csv").string(), "--variant", "rp_g_opt", "--eps",
                   "1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_THAT(r.err, HasSubstr("out of bound"));
}

TEST(CliTest, ReproducibleAcrossRunsAndJobs) {
  const fs::path d = Scratch("repro");
  std::ofstream csv(d / "x.csv");
  for (int i = 0; i < 12; ++i) {
    csv << 0.1 * (i % 5) - 0.2 << "," << 0.05 * i << ",0.3,-0.4\n";
  }
  csv.close();
  for (const std::string variant : {"rp_g_opt", "signrp_rr_smooth"}) {
    std::vector<std::string> base = {"privatize", "--input",
                                     (d / "x.csv").string(), "--variant",
                                     variant, "--eps", "4", "--k", "16"};
    auto run = [&](const std::string& out, const std::string& jobs) {
      std::vector<std::string> args = {"--seed", "9", "--jobs", jobs, "--out",
                                       (d / out).string()};
      args.insert(args.end(), base.begin(), base.end());
      return Call(args);
    };
    ASSERT_EQ(run("a", "1").code, 0);
    ASSERT_EQ(run("b", "3").code, 0);
    const std::string payload =
        variant == "rp_g_opt" ? "sketches.bin" : "signs.bin";
    EXPECT_EQ(Slurp(d / "a" / payload), Slurp(d / "b" / payload));
    EXPECT_EQ(Slurp(d / "a" / "provenance.json"),
              Slurp(d / "b" / "provenance.json"));
    auto m = nlohmann::json::parse(Slurp(d / "a" / "manifest.json"));
    EXPECT_EQ(m.at("subcommand"), "privatize");
    EXPECT_EQ(m.at("seeds"), nlohmann::json::array({9}));
    EXPECT_TRUE(m.at("outputs").contains(payload));
    EXPECT_EQ(m.at("inputs").size(), 1u);
  }
}

TEST(CliTest, EstimateRoundTrip) {
  const fs::path d = Scratch("estimate");
  std::ofstream(d / "x.csv") << "0.5,0.1,0.2\n0.2,0.3,-0.1\n0.4,0.4,0.4\n";
  ASSERT_EQ(Call({"--out", (d / "rp").string(), "privatize", "--input",
                  (d / "x.csv").string(), "--variant", "rp", "--k", "2000"})
                .code,
            0);
  Result r = Call({"estimate", "--a", (d / "rp").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::stringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  EXPECT_EQ(header, "a,b,estimator,estimate,variance,out_of_range");
  std::getline(lines, row);
  auto f = Split(row);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f[0], "0");
  EXPECT_EQ(f[1], "1");
  EXPECT_EQ(f[2], "inner_product");
  // <u0, u1> = 0.1 + 0.03 - 0.02; k = 2000 keeps the error near 0.01.
  EXPECT_NEAR(std::stod(f[3]), 0.11, 0.06);

  ASSERT_EQ(Call({"--out", (d / "s").string(), "privatize", "--input",
                  (d / "x.csv").string(), "--sign", "--variant", "rr", "--eps",
                  "100", "--k", "32"})
                .code,
            0);
  Result s = Call({"estimate", "--a", (d / "s").string(), "--b",
                   (d / "s").string()});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 10);
  // Identical bit strings debias past a zero angle and are flagged.
  std::stringstream srows(s.out);
  std::getline(srows, header);
  std::getline(srows, row);
  f = Split(row);
  ASSERT_EQ(f.size(), 6u);
  EXPECT_EQ(f[2], "angle_from_rr_signs");
  EXPECT_EQ(f[5], "1");

  Result mixed = Call({"estimate", "--a", (d / "rp").string(), "--b",
                       (d / "s").string(), "--estimator", "hamming"});
  EXPECT_EQ(mixed.code, 1);
}

TEST(CliTest, AuditPrintsRows) {
  Result r = Call({"audit", "--mechanism", "signrp_rr", "--eps", "1,2", "--p",
                   "3", "--k", "4", "--grid", "5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 5);
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
  Result m = Call({"audit", "--mechanism", "signrp_rr", "--eps", "1", "--p",
                   "3", "--k", "4", "--grid", "5", "--mutation", "halved_flip"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_THAT(m.out, HasSubstr("FAIL"));
}

TEST(CliTest, OracleRejectsSmallN) {
  EXPECT_EQ(Call({"oracle", "--target", "collision", "--n", "10"}).code, 1);
  Result r = Call({"oracle", "--target", "colision", "--n", "1000"});
  EXPECT_EQ(r.code, 1);
  EXPECT_THAT(r.err, HasSubstr("did you mean 'collision'"));
}

TEST(CliTest, BenchWritesMetrics) {
  const fs::path d = Scratch("bench");
  std::ofstream(d / "b.json")
      << R"({"data": {"n_database": 60, "n_queries": 5, "p": 16, "clusters": 3},
             "mechanisms": [{"name": "rp", "k": 32},
                            {"name": "rp_g_opt", "epsilons": [5], "k": 32}],
             "r_grid": [5], "gold": 5, "num_seeds": 2})";
  Result r = Call({"--config", (d / "b.json").string(), "--out",
                   (d / "o").string(), "bench", "retrieval"});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string metrics = Slurp(d / "o" / "metrics.csv");
  EXPECT_THAT(metrics, HasSubstr("rp_g_opt,5,32,5,precision"));
  auto m = nlohmann::json::parse(Slurp(d / "o" / "manifest.json"));
  EXPECT_EQ(m.at("seeds").size(), 2u);
  EXPECT_EQ(Call({"bench", "retrieval"}).code, 1);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(ExitCodeFor(absl::OkStatus()), kExitOk);
  EXPECT_EQ(ExitCodeFor(absl::InvalidArgumentError("x")), kExitValidation);
  EXPECT_EQ(ExitCodeFor(absl::InternalError("x")), kExitCalibration);
}

}  // namespace
}  // namespace dprp
