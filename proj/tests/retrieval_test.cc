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

#include "dprp/retrieval.h"

#include <cmath>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dprp {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(RetrievalTest, PrecisionRecall) {
  const std::vector<int> retrieved = {1, 2, 3, 4};
  const std::vector<int> gold = {2, 4, 6};
  auto pr = PrecisionRecallAt(retrieved, gold, 4);
  ASSERT_TRUE(pr.ok());
  EXPECT_DOUBLE_EQ(pr->precision, 0.5);
  EXPECT_DOUBLE_EQ(pr->recall, 2.0 / 3);
  pr = PrecisionRecallAt(retrieved, gold, 2);
  ASSERT_TRUE(pr.ok());
  EXPECT_DOUBLE_EQ(pr->precision, 0.5);
  EXPECT_DOUBLE_EQ(pr->recall, 1.0 / 3);
  EXPECT_FALSE(PrecisionRecallAt(retrieved, gold, 0).ok());
  EXPECT_FALSE(PrecisionRecallAt(retrieved, {}, 2).ok());
}

TEST(RetrievalTest, TopIndicesBreaksTiesByIndex) {
  const std::vector<double> s = {1, 3, 3, 2, 1};
  EXPECT_THAT(TopIndices(s, 3), ElementsAre(1, 2, 3));
  EXPECT_THAT(TopIndices(s, 2, /*ascending=*/true), ElementsAre(0, 4));
  EXPECT_EQ(TopIndices(s, 10).size(), 5u);
}

TEST(RetrievalTest, RankByCosineIgnoresNorm) {
  Eigen::MatrixXd db(3, 2);
  db << 10, 0,   // angle 0 to the query
      0.6, 0.8,  // closer than row 2
      0, 1;
  Eigen::MatrixXd q(1, 2);
  q << 1, 0.1;
  auto r = RankByCosine(q, db, 3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_THAT(r[0], ElementsAre(0, 1, 2));
}

TEST(RetrievalTest, RankByHamming) {
  const std::vector<std::vector<uint64_t>> db = {{0b1111}, {0b0001}, {0b0111}};
  const std::vector<std::vector<uint64_t>> q = {{0b0011}};
  auto r = RankByHamming(q, db, 3);
  // Distances 2, 1, 1.
  EXPECT_THAT(r[0], ElementsAre(1, 2, 0));
}

TEST(RetrievalTest, KnnVote) {
  const std::vector<int> labels = {0, 1, 1, 2, 0};
  EXPECT_EQ(KnnVote(std::vector<int>{1, 2, 0}, labels, 3), 1);
  // Tie between labels 0 and 2: the nearer one wins.
  EXPECT_EQ(KnnVote(std::vector<int>{3, 0, 4, 1}, labels, 2), 2);
  EXPECT_EQ(KnnVote(std::vector<int>{0, 3}, labels, 2), 0);
}

TEST(RetrievalTest, GoldStandard) {
  Dataset db;
  db.bound = 10;
  db.rows = {{1, 0}, {0, 1}, {1, 1}, {-1, 0}};
  Dataset q;
  q.bound = 10;
  q.rows = {{1, 0.2}};
  auto g = BuildGoldStandard(db, q, 2);
  ASSERT_TRUE(g.ok()) << g.status();
  EXPECT_EQ(g->g, 2);
  EXPECT_THAT(g->neighbours[0], ElementsAre(0, 2));
  g = BuildGoldStandard(db, q, 50);
  ASSERT_TRUE(g.ok());
  EXPECT_EQ(g->g, 4);
  q.rows = {{1, 0.2, 3}};
  EXPECT_FALSE(BuildGoldStandard(db, q, 2).ok());
}

TEST(RetrievalTest, UnknownMechanismListsChoices) {
  BenchMechanism m;
  m.name = "rp_gg";
  m.epsilons = {1};
  auto s = ValidateBenchMechanism(m);
  EXPECT_FALSE(s.ok());
  EXPECT_THAT(std::string(s.message()), HasSubstr("rp_g_opt"));
  m.name = "rp_g";
  m.epsilons = {0};
  EXPECT_FALSE(ValidateBenchMechanism(m).ok());
}

SyntheticData SmallData() {
  SyntheticSpec s;
  s.n_database = 200;
  s.n_queries = 20;
  s.p = 64;
  s.clusters = 5;
  auto d = MakeSyntheticData(s);
  EXPECT_TRUE(d.ok());
  return *d;
}

RetrievalConfig SmallConfig() {
  RetrievalConfig cfg;
  cfg.r_grid = {10};
  cfg.gold = 10;
  cfg.seeds = {1, 2};
  cfg.mechanisms = {{"rp", {}, 32}, {"rp_g_opt", {1, 1000, 1e6}, 32},
                    {"signrp", {}, 64}, {"signrp_rr_smooth", {1, 1e4}, 64}};
  return cfg;
}

TEST(RetrievalTest, RunProducesEveryCell) {
  auto rows = RunRetrieval(SmallData(), SmallConfig());
  ASSERT_TRUE(rows.ok()) << rows.status();
  // (1 + 3 + 1 + 2) cells x (precision, recall, knn_accuracy).
  EXPECT_EQ(rows->size(), 21u);
  for (const auto& r : *rows) {
    EXPECT_GE(r.mean, 0);
    EXPECT_LE(r.mean, 1);
    EXPECT_EQ(r.seeds, 2);
  }
  const MetricRow* base = FindMetric(*rows, "rp", INFINITY, 10, "precision");
  ASSERT_NE(base, nullptr);
  EXPECT_GT(base->mean, 0.4);
}

TEST(RetrievalTest, PrivacyCostShrinksWithEpsilon) {
  auto rows = RunRetrieval(SmallData(), SmallConfig());
  ASSERT_TRUE(rows.ok());
  auto p = [&](const std::string& m, double e) {
    const MetricRow* r = FindMetric(*rows, m, e, 10, "precision");
    EXPECT_NE(r, nullptr) << m << " " << e;
    return r ? r->mean : -1;
  };
  EXPECT_LT(p("rp_g_opt", 1), p("rp_g_opt", 1000));
  // At a huge budget the noise is negligible and the projection matches the
  // non-private baseline seed by seed.
  EXPECT_NEAR(p("rp_g_opt", 1e6), p("rp", INFINITY), 1e-12);
  EXPECT_LT(p("signrp_rr_smooth", 1), p("signrp_rr_smooth", 1e4));
  EXPECT_NEAR(p("signrp_rr_smooth", 1e4), p("signrp", INFINITY), 0.05);
}

TEST(RetrievalTest, DeterministicAcrossJobs) {
  RetrievalConfig cfg = SmallConfig();
  auto a = RunRetrieval(SmallData(), cfg);
  cfg.jobs = 3;
  auto b = RunRetrieval(SmallData(), cfg);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(MetricsCsv(*a), MetricsCsv(*b));
}

TEST(RetrievalTest, CsvLayout) {
  MetricRow r;
  r.mechanism = "rp_g";
  r.epsilon = 2;
  r.k = 64;
  r.r = 10;
  r.metric = "precision";
  r.mean = 0.5;
  r.seeds = 3;
  const std::string csv = MetricsCsv({r});
  EXPECT_THAT(csv, HasSubstr("mechanism,epsilon,k,R,metric,mean,std_error,seeds\n"));
  EXPECT_THAT(csv, HasSubstr("rp_g,2,64,10,precision,"));
}

}  // namespace
}  // namespace dprp
