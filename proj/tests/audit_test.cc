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

#include "dprp/audit.h"

#include <cmath>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "dprp/dp_sign.h"

namespace dprp {
namespace {

using ::testing::HasSubstr;

bool AllPass(const std::vector<AuditReport>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) return false;
  }
  return !reports.empty();
}

bool AnyFail(const std::vector<AuditReport>& reports) {
  for (const auto& r : reports) {
    if (!r.pass) return true;
  }
  return false;
}

TEST(NeighbourGridTest, SymmetricAndSkipsZero) {
  const std::vector<double> u = {0.5, -0.5};
  auto g = NeighbourGrid(u, 1.0, 21);
  ASSERT_EQ(g.size(), 40u);
  EXPECT_EQ(g.front().coordinate, 0);
  EXPECT_DOUBLE_EQ(g.front().shift, -1.0);
  EXPECT_DOUBLE_EQ(g[19].shift, 1.0);
  EXPECT_DOUBLE_EQ(g[19].u[0], 1.5);
  EXPECT_DOUBLE_EQ(g[19].u[1], -0.5);
  for (const auto& n : g) EXPECT_NE(n.shift, 0);
  // A bound drops neighbours leaving [-C, C].
  EXPECT_LT(NeighbourGrid(u, 1.0, 21, 1.0).size(), 40u);
}

TEST(HockeyStickTest, HandComputed) {
  BitLaw p{{0.75}, {0.25}};
  BitLaw q{{0.25}, {0.75}};
  auto tv = HockeyStick(p, q, 0);
  ASSERT_TRUE(tv.ok());
  EXPECT_DOUBLE_EQ(*tv, 0.5);
  EXPECT_NEAR(*HockeyStick(p, q, std::log(3.0)), 0, 1e-16);
  // Two bits: outputs (+,+) 0.5625 vs 0.0625, e^1 scaling.
  BitLaw p2{{0.75, 0.75}, {0.25, 0.25}};
  BitLaw q2{{0.25, 0.25}, {0.75, 0.75}};
  const double e = std::exp(1.0);
  const double want = std::max(0.0, 0.5625 - e * 0.0625) +
                      2 * std::max(0.0, 0.1875 - e * 0.1875) +
                      std::max(0.0, 0.0625 - e * 0.5625);
  EXPECT_NEAR(*HockeyStick(p2, q2, 1.0), want, 1e-15);
}

TEST(AuditPrivacyTest, PerBitMatchesRandomizedResponse) {
  AuditSetup s;
  s.mechanism = "signrp_rr";
  s.epsilon = 2;
  s.k = 8;
  auto r = RunAudit(s);
  ASSERT_TRUE(r.ok()) << r.status();
  ASSERT_EQ(r->size(), 2u);
  EXPECT_TRUE(AllPass(*r));
  // Some neighbour flips a sign, so the per-bit bound is attained.
  EXPECT_NEAR((*r)[0].worst, 2.0 / 8, 1e-12);
  EXPECT_NEAR((*r)[1].worst, 2.0, 1e-9);
}

TEST(AuditPrivacyTest, ShippedSignMechanismsPass) {
  for (const char* m : {"signrp_rr", "signrp_rr_smooth"}) {
    for (double eps : {0.5, 2.0, 8.0}) {
      AuditSetup s;
      s.mechanism = m;
      s.epsilon = eps;
      s.p = 5;
      s.k = 6;
      auto r = RunAudit(s);
      ASSERT_TRUE(r.ok()) << r.status();
      EXPECT_TRUE(AllPass(*r)) << (*r)[0].Summary() << "\n" << (*r)[1].Summary();
    }
  }
}

TEST(AuditPrivacyTest, SignOporpPassesAndChangesAtMostTBits) {
  for (const char* m : {"signoporp_rr", "signoporp_rr_smooth"}) {
    for (int t : {1, 2, 4}) {
      AuditSetup s;
      s.mechanism = m;
      s.epsilon = 2;
      s.p = 6;
      s.k = 4;
      s.t = t;
      auto r = RunAudit(s);
      ASSERT_TRUE(r.ok()) << r.status();
      EXPECT_TRUE(AllPass(*r)) << m << " t=" << t << " " << (*r)[0].Summary();
      for (const auto& rep : *r) EXPECT_LE(rep.max_changed_bits, t);
      EXPECT_NEAR((*r)[0].claimed_epsilon, 2.0 / t, 1e-15);
    }
  }
}

TEST(AuditPrivacyTest, IdpVariantsPass) {
  for (const char* m : {"idp_signrp_rr", "idp_signrp_g"}) {
    AuditSetup s;
    s.mechanism = m;
    s.epsilon = 1;
    s.delta = 1e-3;
    s.p = 4;
    s.k = 8;
    auto r = RunAudit(s);
    ASSERT_TRUE(r.ok()) << r.status();
    EXPECT_TRUE(AllPass(*r)) << (*r)[0].Summary();
    EXPECT_EQ((*r)[0].scope, AuditScope::kIdp);
  }
}

TEST(AuditPrivacyTest, MutationsFail) {
  struct Case {
    const char* mechanism;
    Mutation mutation;
  };
  for (const Case& c : {Case{"signrp_rr", Mutation::kHalvedFlip},
                        Case{"signrp_rr_smooth", Mutation::kHalvedFlip},
                        Case{"signoporp_rr", Mutation::kHalvedFlip},
                        Case{"signoporp_rr", Mutation::kDroppedCoin},
                        Case{"signoporp_rr_smooth", Mutation::kDroppedCoin},
                        Case{"idp_signrp_rr", Mutation::kHalvedFlip},
                        Case{"idp_signrp_g", Mutation::kHalvedSigma},
                        Case{"rp_g_opt", Mutation::kHalvedSigma},
                        Case{"raw_g_opt", Mutation::kHalvedSigma}}) {
    AuditSetup s;
    s.mechanism = c.mechanism;
    s.epsilon = 1;
    s.delta = 1e-3;
    s.p = 6;
    s.k = 4;
    s.mutation = c.mutation;
    auto r = RunAudit(s);
    ASSERT_TRUE(r.ok()) << r.status();
    EXPECT_TRUE(AnyFail(*r)) << c.mechanism << " " << MutationName(c.mutation);
  }
}

TEST(AuditPrivacyTest, NoiseMechanismsPass) {
  for (const char* m :
       {"raw_g_opt", "rp_g", "rp_g_opt", "rp_l", "rp_g_opt_b", "oporp"}) {
    AuditSetup s;
    s.mechanism = m;
    s.epsilon = 1;
    s.delta = 1e-5;
    s.p = 6;
    s.k = 4;
    auto r = RunAudit(s);
    ASSERT_TRUE(r.ok()) << m << ": " << r.status();
    EXPECT_TRUE(AllPass(*r)) << (*r)[0].Summary();
  }
}

TEST(AuditPrivacyTest, OptimalGaussianIsTight) {
  AuditSetup s;
  s.mechanism = "raw_g_opt";
  s.epsilon = 1;
  s.delta = 1e-5;
  auto r = RunAudit(s);
  ASSERT_TRUE(r.ok());
  // A unit shift on one coordinate is the worst case, and the calibrated
  // sigma spends the whole delta on it.
  EXPECT_NEAR((*r)[0].worst, 1e-5, 1e-9);
}

TEST(AuditPrivacyTest, ManualCaseFlagsOneSidedZero) {
  AuditCase c;
  c.mechanism = "deterministic";
  c.bases = {{0.5}};
  c.scope = AuditScope::kComposed;
  c.epsilon = 10;
  c.law = [](std::span<const double>, std::span<const double> in)
      -> absl::StatusOr<BitLaw> {
    const bool plus = in[0] >= 0;
    return BitLaw{{plus ? 1.0 : 0.0}, {plus ? 0.0 : 1.0}};
  };
  auto r = AuditPrivacy(c);
  ASSERT_TRUE(r.ok());
  EXPECT_FALSE(r->pass);
  EXPECT_TRUE(std::isinf(r->worst));
}

TEST(AuditPrivacyTest, Errors) {
  AuditSetup s;
  s.mechanism = "nope";
  auto r = RunAudit(s);
  ASSERT_FALSE(r.ok());
  EXPECT_THAT(std::string(r.status().message()), HasSubstr("signrp_rr"));
  s.mechanism = "signrp_rr";
  s.bases = {{1, 2}};
  EXPECT_FALSE(RunAudit(s).ok());
  EXPECT_FALSE(ParseMutation("bogus").ok());
  EXPECT_EQ(*ParseMutation("dropped_coin"), Mutation::kDroppedCoin);
  BitLaw big{std::vector<double>(30, 0.5), std::vector<double>(30, 0.5)};
  BitLaw other = big;
  for (auto& x : other.plus) x = 0.25;
  for (auto& x : other.minus) x = 0.75;
  EXPECT_FALSE(HockeyStick(big, other, 1).ok());
}

TEST(MutatedLawTest, HalvesFlipsAndDropsCoins) {
  FlipPlan plan;
  plan.base_signs = {1, -1, 1};
  plan.eps_prime = {std::log(3.0), std::log(3.0), 0};
  plan.coin = {0, 0, 1};
  BitLaw law = MutatedLaw(plan, Mutation::kHalvedFlip);
  EXPECT_NEAR(law.plus[0], 0.875, 1e-15);
  EXPECT_NEAR(law.plus[1], 0.125, 1e-15);
  EXPECT_DOUBLE_EQ(law.plus[2], 0.5);
  law = MutatedLaw(plan, Mutation::kDroppedCoin);
  EXPECT_DOUBLE_EQ(law.plus[0], 0.75);
  EXPECT_DOUBLE_EQ(law.plus[2], 1.0);
}

}  // namespace
}  // namespace dprp
