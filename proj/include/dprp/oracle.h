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

// Monte Carlo oracles for the closed-form quantities in analytic.h.

#ifndef DPRP_ORACLE_H_
#define DPRP_ORACLE_H_

#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace dprp {

enum class OracleTarget {
  // Pr(sign(w'u) == sign(w'v)) for Gaussian w at angle theta; with a finite
  // eps_prime both signs pass through randomized response first.
  kCollision,
  // Pr(r max_{i<=p} |Z_i| >= |Z_0|).
  kPPlusGaussian,
  // Pr(|w'u| <= r) for Rademacher w and a fixed unit-norm u of length p.
  kPPlusRademacher,
  // Var(OPORP inner product) / Var(Rademacher RP inner product), no noise.
  kOporpRpRatio,
  // Fraction of Gaussian p x k matrices whose sign-change count exceeds the
  // high-probability bound, for a fixed u of norm `norm`.
  kNPlusExceedance,
};

std::string OracleTargetName(OracleTarget t);
absl::StatusOr<OracleTarget> ParseOracleTarget(std::string_view name);

struct OracleQuery {
  OracleTarget target = OracleTarget::kCollision;
  double theta = 1.0;
  double r = 0.5;
  long long p = 100;
  int k = 16;
  // +infinity disables randomized response.
  double eps_prime = std::numeric_limits<double>::infinity();
  double beta = 1.0;
  double norm = 10.0;
  double delta = 0.01;
};

struct OracleResult {
  double estimate = 0;
  double standard_error = 0;
  long long samples = 0;
  // Closed-form value of the same quantity (the bound's nominal level delta
  // for kNPlusExceedance).
  double analytic = 0;
};

// Rejects n < 100.
absl::StatusOr<OracleResult> MonteCarloOracle(const OracleQuery& query,
                                              long long n, uint64_t seed);

}  // namespace dprp

#endif  // DPRP_ORACLE_H_
