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

#include "dprp/config.h"

#include <cmath>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dprp {
namespace {

using ::testing::HasSubstr;
using nlohmann::json;

TEST(MechanismConfigTest, Defaults) {
  auto c = ParseMechanismConfig(json{{"variant", "rp_g_opt"}, {"epsilon", 2}});
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->beta, 1.0);
  EXPECT_EQ(c->delta, 1e-6);
  EXPECT_EQ(c->t, 1);
  EXPECT_EQ(c->k, 256);
  EXPECT_EQ(c->mode, SensitivityMode::kDefault);
}

TEST(MechanismConfigTest, RejectsNonPositiveEpsilon) {
  for (double e : {0.0, -1.0}) {
    auto c = ParseMechanismConfig(json{{"variant", "rp_g"}, {"epsilon", e}});
    ASSERT_FALSE(c.ok());
    EXPECT_THAT(c.status().message(), HasSubstr("config.epsilon"));
  }
}

TEST(MechanismConfigTest, BaselineNeedsNoEpsilon) {
  EXPECT_TRUE(ParseMechanismConfig(json{{"variant", "rp"}}).ok());
  EXPECT_FALSE(ParseMechanismConfig(json{{"variant", "rp_l"}}).ok());
}

TEST(MechanismConfigTest, UnknownVariantSuggests) {
  auto c = ParseMechanismConfig(json{{"variant", "rp_gopt"}, {"epsilon", 1}});
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(c.status().message(), HasSubstr("config.variant"));
  EXPECT_THAT(c.status().message(), HasSubstr("did you mean 'rp_g_opt'"));
  EXPECT_THAT(c.status().message(), HasSubstr("expected one of"));
}

TEST(MechanismConfigTest, UnknownKeySuggests) {
  auto c = ParseMechanismConfig(
      json{{"variant", "rp_g"}, {"epsilon", 1}, {"epsilom", 1}});
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(c.status().message(), HasSubstr("epsilom"));
  EXPECT_THAT(c.status().message(), HasSubstr("did you mean 'epsilon'"));
}

TEST(MechanismConfigTest, TypeErrorsNameTheField) {
  auto c = ParseMechanismConfig(json{{"variant", "rp_g"}, {"epsilon", "one"}});
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(c.status().message(), HasSubstr("config.epsilon"));
  auto d = ParseMechanismConfig(
      json{{"variant", "rp_g"}, {"epsilon", 1}, {"delta", 1.5}});
  ASSERT_FALSE(d.ok());
  EXPECT_THAT(d.status().message(), HasSubstr("config.delta"));
}

TEST(MechanismConfigTest, ParsesSensitivityMode) {
  auto c = ParseMechanismConfig(json{
      {"variant", "rp_g_opt"}, {"epsilon", 1}, {"sensitivity_mode", "exact"}});
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->mode, SensitivityMode::kExactFromMatrix);
  auto bad = ParseSensitivityMode("exakt");
  ASSERT_FALSE(bad.ok());
  EXPECT_THAT(bad.status().message(), HasSubstr("did you mean 'exact'"));
}

TEST(MechanismConfigTest, JsonRoundTrip) {
  auto c = ParseMechanismConfig(json{{"variant", "signoporp_rr"},
                                     {"epsilon", 3},
                                     {"k", 64},
                                     {"t", 4}});
  ASSERT_TRUE(c.ok()) << c.status();
  auto again = ParseMechanismConfig(ToJson(*c));
  ASSERT_TRUE(again.ok()) << again.status();
  EXPECT_EQ(ToJson(*again), ToJson(*c));
}

TEST(BenchConfigTest, DefaultsAndSeeds) {
  auto c = ParseBenchConfig(
      json{{"mechanisms", json::array({json{{"name", "rp"}}})},
           {"num_seeds", 3}},
      7);
  ASSERT_TRUE(c.ok()) << c.status();
  EXPECT_EQ(c->retrieval.seeds.size(), 3u);
  EXPECT_EQ(c->retrieval.seeds.front(), 7u);
  EXPECT_EQ(c->retrieval.data.seed, 7u);
}

TEST(BenchConfigTest, MechanismErrorsCarryIndex) {
  auto c = ParseBenchConfig(json{
      {"mechanisms", json::array({json{{"name", "rp"}},
                                  json{{"name", "rp_gg"}, {"epsilons", {1}}}})}});
  ASSERT_FALSE(c.ok());
  EXPECT_THAT(c.status().message(), HasSubstr("config.mechanisms[1].name"));
  EXPECT_THAT(c.status().message(), HasSubstr("did you mean"));
}

TEST(BenchConfigTest, RequiresMechanisms) {
  EXPECT_FALSE(ParseBenchConfig(json::object()).ok());
  EXPECT_FALSE(ParseBenchConfig(json::array()).ok());
}

TEST(ProvenanceJsonTest, RoundTrip) {
  Provenance p;
  p.mechanism = "signrp_rr";
  p.spec_digest = "00ff";
  p.is_private = true;
  p.budget.epsilon = 2;
  p.eps_prime = 0.25;
  p.n_plus = 3;
  p.lj_histogram = {0, 4, 1};
  p.notes = {"a"};
  auto q = ProvenanceFromJson(ToJson(p));
  ASSERT_TRUE(q.ok()) << q.status();
  EXPECT_EQ(ToJson(*q), ToJson(p));
  EXPECT_EQ(*q->eps_prime, 0.25);
  EXPECT_EQ(*q->n_plus, 3);

  Provenance none;
  const json j = ToJson(none);
  EXPECT_TRUE(j.at("eps_prime").is_null());
  auto r = ProvenanceFromJson(j);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r->eps_prime.has_value());
}

TEST(ReadJsonFileTest, Errors) {
  EXPECT_EQ(ReadJsonFile("/nonexistent/x.json").status().code(),
            absl::StatusCode::kNotFound);
}

}  // namespace
}  // namespace dprp
