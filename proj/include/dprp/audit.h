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

// Exact privacy audits. Sign mechanisms are checked through their exact
// per-bit output laws over a grid of beta-neighbours; Gaussian and Laplace
// mechanisms through their density ratios.

#ifndef DPRP_AUDIT_H_
#define DPRP_AUDIT_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dprp/dp_sign.h"

namespace dprp {

struct Neighbour {
  int coordinate = 0;
  double shift = 0;
  std::vector<double> u;
};

// For every coordinate, `points` evenly spaced shifts in [-beta, beta]
// (both endpoints included; the zero shift is skipped). Neighbours with an
// entry outside [-bound, bound] are dropped when a bound is given.
std::vector<Neighbour> NeighbourGrid(std::span<const double> u, double beta,
                                     int points = 21,
                                     std::optional<double> bound = std::nullopt);

enum class AuditScope {
  // Every output bit separately.
  kPerBit,
  // The whole output vector (pure: worst output log-ratio; approximate:
  // exact hockey-stick divergence), both directions.
  kComposed,
  // As kComposed, with the mechanism fixed for the base vector.
  kIdp,
};

std::string AuditScopeName(AuditScope scope);

// Output law of the mechanism under audit when its input-dependent parts are
// fixed for `reference` and it is applied to `input`. DP mechanisms ignore
// `reference`.
using LawFn = std::function<absl::StatusOr<BitLaw>(
    std::span<const double> reference, std::span<const double> input)>;

struct AuditCase {
  std::string mechanism;
  std::vector<std::vector<double>> bases;
  double beta = 1.0;
  int grid_points = 21;
  std::optional<double> bound;
  AuditScope scope = AuditScope::kPerBit;
  double epsilon = 0;
  double delta = 0;
  LawFn law;
  double tolerance = 1e-9;
};

struct AuditReport {
  std::string mechanism;
  AuditScope scope = AuditScope::kPerBit;
  double claimed_epsilon = 0;
  double claimed_delta = 0;
  // Worst log-ratio (pure claims) or worst hockey-stick divergence at the
  // claimed epsilon (approximate claims).
  double worst = 0;
  // worst minus the claim; PASS iff margin <= tolerance.
  double margin = 0;
  bool pass = false;
  int neighbours = 0;
  int worst_base = -1;
  int worst_coordinate = -1;
  double worst_shift = 0;
  int worst_bit = -1;
  // Largest number of bits whose law differs between a base and one
  // neighbour.
  int max_changed_bits = 0;

  std::string Summary() const;
};

absl::StatusOr<AuditReport> AuditPrivacy(const AuditCase& c);

// Sum over outputs o of max(0, P(o) - e^eps Q(o)) for independent bits.
// Bits with equal laws cancel; at most 24 differing bits are enumerated.
absl::StatusOr<double> HockeyStick(const BitLaw& p, const BitLaw& q,
                                   double eps);

enum class Mutation {
  kNone,
  // Every finite randomized-response flip probability is halved.
  kHalvedFlip,
  // Coins on empty bins are replaced by the deterministic sign +1.
  kDroppedCoin,
  // Gaussian noise scale halved.
  kHalvedSigma,
};

std::string MutationName(Mutation m);
absl::StatusOr<Mutation> ParseMutation(std::string_view name);

// Law of a flip plan with a mutation applied.
BitLaw MutatedLaw(const FlipPlan& plan, Mutation m);

// A complete audit request as issued by the CLI and the acceptance suite.
struct AuditSetup {
  // signrp_rr, signrp_rr_smooth, signoporp_rr, signoporp_rr_smooth,
  // idp_signrp_rr, idp_signrp_g, raw_g_opt, rp_g, rp_g_opt, rp_l,
  // rp_g_opt_b, oporp.
  std::string mechanism;
  double epsilon = 1.0;
  double delta = 1e-6;
  double beta = 1.0;
  int p = 4;
  int k = 8;
  int t = 1;
  int grid_points = 21;
  // Projection kind for signrp_*; empty selects gaussian.
  std::string projection;
  uint64_t seed = 1;
  Mutation mutation = Mutation::kNone;
  // Base vectors; empty selects a default set derived from the seed (a dense
  // vector, a vector with a single non-zero entry and a small dense vector).
  std::vector<std::vector<double>> bases;
};

// Runs every scope that applies to the mechanism: per-bit and composed for
// DP sign mechanisms, two-sided iDP for iDP mechanisms, and the composed
// density-ratio audit for Gaussian and Laplace mechanisms.
absl::StatusOr<std::vector<AuditReport>> RunAudit(const AuditSetup& setup);

// Gaussian or Laplace mechanism with output shift s = A (u' - u) for the
// effective matrix A: checks the exact hockey-stick divergence, integrated
// numerically along s over an output grid, against delta (Gaussian), or the
// worst density log-ratio against epsilon (Laplace).
struct NoiseAuditCase {
  std::string mechanism;
  std::vector<std::vector<double>> bases;
  double beta = 1.0;
  int grid_points = 21;
  // Output shift for an input difference.
  std::function<std::vector<double>(std::span<const double>)> shift;
  bool laplace = false;
  double scale = 0;
  double epsilon = 0;
  double delta = 0;
  double tolerance = 1e-9;
};

absl::StatusOr<AuditReport> AuditNoiseMechanism(const NoiseAuditCase& c);

}  // namespace dprp

#endif  // DPRP_AUDIT_H_
