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

// Individual-DP sign mechanisms. Only projections whose sign some beta
// neighbour of u could change (the noise-indicator set A) are perturbed; the
// remaining signs are released exactly. The guarantee holds for the fixed
// input u and its neighbours, not for all pairs of inputs.

#ifndef DPRP_IDP_SIGN_H_
#define DPRP_IDP_SIGN_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "dprp/core.h"
#include "dprp/dp_sign.h"
#include "dprp/projections.h"
#include "dprp/rng.h"

namespace dprp {

struct NoiseIndicatorSet {
  std::vector<uint8_t> indicators;
  // |A|.
  int n_tilde = 0;
};

// I_j = 1 iff beta / sqrt(k) >= |x_j| for a scaled Rademacher sketch x.
NoiseIndicatorSet NoiseIndicators(std::span<const double> x, double beta,
                                  int k);

// Indicators computed from the unscaled projections of u, with threshold
// beta * max_i |W_ij|. This form is exact for any dense matrix.
absl::StatusOr<NoiseIndicatorSet> NoiseIndicatorsFor(
    const ProjectionOperator& op, std::span<const double> u, double beta);

enum class IdpVariant {
  // Gaussian noise with Delta_2 = beta sqrt(N~ / k) on the bits in A.
  kGaussian,
  // Randomized response with eps / N~ on the bits in A.
  kRr,
};

// Everything that determines the output law for one reference input.
struct IdpPlan {
  NoiseIndicatorSet indicators;
  // Scaled projections of the reference input.
  std::vector<double> x;
  // kGaussian: noise scale (0 if A is empty).
  double sigma = 0;
  // kRr: per-bit flip plan.
  FlipPlan flips;
};

class IdpSignMechanism {
 public:
  // `op` must be a Rademacher projection unless `allow_general_dense` is set.
  // kGaussian requires delta > 0; kRr ignores delta.
  static absl::StatusOr<IdpSignMechanism> Create(ProjectionOperator op,
                                                 const PrivacyBudget& budget,
                                                 IdpVariant variant,
                                                 bool allow_general_dense =
                                                     false);

  const ProjectionOperator& projection() const { return op_; }
  IdpVariant variant() const { return variant_; }
  const PrivacyBudget& budget() const { return budget_; }

  // Plan for reference input u.
  absl::StatusOr<IdpPlan> Plan(std::span<const double> u) const;
  // Output law when the mechanism fixed for `reference` is applied to
  // `input` (input == reference is the real release; neighbours are used by
  // the audit).
  absl::StatusOr<BitLaw> LawFor(const IdpPlan& reference,
                                std::span<const double> input) const;

  absl::StatusOr<Sketch> Privatize(const DataVector& u, RngStream& rng) const;

 private:
  IdpSignMechanism(ProjectionOperator op, PrivacyBudget budget,
                   IdpVariant variant)
      : op_(std::move(op)), budget_(budget), variant_(variant) {}

  ProjectionOperator op_;
  PrivacyBudget budget_;
  IdpVariant variant_;
};

}  // namespace dprp

#endif  // DPRP_IDP_SIGN_H_
