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

// Sign-output mechanisms based on randomized response.
//
// Every mechanism first builds a FlipPlan for the input: the non-private
// signs and a per-bit budget eps'_j. Bit j is kept with probability
// e^{eps'_j} / (e^{eps'_j} + 1); bits marked as coins are replaced by a fair
// coin. The plan's exact output law is what the privacy audit inspects.

#ifndef DPRP_DP_SIGN_H_
#define DPRP_DP_SIGN_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dprp/analytic.h"
#include "dprp/core.h"
#include "dprp/projections.h"
#include "dprp/rng.h"

namespace dprp {

// Independent output bits: bit j is +1 with probability plus[j] and -1 with
// probability minus[j]. Both are stored so that tiny flip probabilities keep
// full relative precision.
struct BitLaw {
  std::vector<double> plus;
  std::vector<double> minus;

  size_t size() const { return plus.size(); }
  // Probability of one complete output vector.
  double Probability(std::span<const int8_t> bits) const;
};

enum class FlipDerivation {
  kRr,
  kSmooth,
  kOporpRr,
  kOporpSmooth,
  kIdpRr,
};

std::string FlipDerivationName(FlipDerivation d);

struct FlipPlan {
  FlipDerivation derivation = FlipDerivation::kRr;
  std::vector<int8_t> base_signs;
  // Per-bit budget; +infinity means the bit is released exactly.
  std::vector<double> eps_prime;
  // Bits replaced by a fair coin.
  std::vector<uint8_t> coin;
  // L_j for the smooth variants, otherwise empty.
  std::vector<int> lj;

  size_t size() const { return base_signs.size(); }
  double KeepProbability(size_t j) const;
  double FlipProbability(size_t j) const;
  BitLaw Law() const;
  std::vector<int8_t> Sample(RngStream& rng) const;
};

// 1 / (e^eps + 1), the probability of flipping a bit released with budget
// eps.
double RrFlipProbability(double eps);
double RrKeepProbability(double eps);

// max(1, ceil(ratio)), evaluated with a 1e-9 downward tolerance so that
// ratios landing on an integer up to rounding error do not jump a level.
int SmoothLevel(double ratio);

enum class SignRpVariant { kRr, kRrSmooth };

// DP-SignRP-RR and DP-SignRP-RR-smooth over a dense projection.
class SignRpMechanism {
 public:
  // For kRr, `norm_lower_bound` is the public lower bound m on data norms.
  // When m >= beta the per-bit budget is eps / N+ with N+ from the
  // high-probability bound (requires delta > 0); otherwise it is eps / k and
  // the mechanism is pure. kRrSmooth requires delta == 0.
  static absl::StatusOr<SignRpMechanism> Create(ProjectionOperator op,
                                                const PrivacyBudget& budget,
                                                SignRpVariant variant,
                                                double norm_lower_bound = 0);

  const ProjectionOperator& projection() const { return op_; }
  SignRpVariant variant() const { return variant_; }
  // N+ used by kRr.
  int n_plus() const { return n_plus_; }
  // eps / N+ for kRr.
  double eps_prime() const { return eps_prime_; }

  // Plan for any vector of length p. Does not check the norm bound.
  absl::StatusOr<FlipPlan> Plan(std::span<const double> u) const;
  absl::StatusOr<Sketch> Privatize(const DataVector& u, RngStream& rng) const;

 private:
  SignRpMechanism(ProjectionOperator op, PrivacyBudget budget,
                  SignRpVariant variant, double m, int n_plus,
                  double eps_prime)
      : op_(std::move(op)), budget_(budget), variant_(variant), m_(m),
        n_plus_(n_plus), eps_prime_(eps_prime) {}

  ProjectionOperator op_;
  PrivacyBudget budget_;
  SignRpVariant variant_;
  double m_;
  int n_plus_;
  double eps_prime_;
  std::vector<std::string> notes_;
};

enum class SignOporpVariant { kRr, kRrSmooth };

// DP-SignOPORP-RR and DP-SignOPORP-RR-smooth with t repetitions. Each
// repetition is an independent OPORP with k / t bins released at eps / t;
// outputs are concatenated.
class SignOporpMechanism {
 public:
  static absl::StatusOr<SignOporpMechanism> Create(const ProjectionSpec& spec,
                                                   const PrivacyBudget& budget,
                                                   SignOporpVariant variant);
  // Explicit per-repetition operators, each with k / t bins.
  static absl::StatusOr<SignOporpMechanism> Create(
      std::vector<ProjectionOperator> runs, const PrivacyBudget& budget,
      SignOporpVariant variant);

  const std::vector<ProjectionOperator>& runs() const { return runs_; }
  int k() const;
  SignOporpVariant variant() const { return variant_; }
  const ProjectionSpec& spec() const { return spec_; }

  absl::StatusOr<FlipPlan> Plan(std::span<const double> u) const;
  absl::StatusOr<Sketch> Privatize(const DataVector& u, RngStream& rng) const;

 private:
  SignOporpMechanism(ProjectionSpec spec, std::vector<ProjectionOperator> runs,
                     PrivacyBudget budget, SignOporpVariant variant)
      : spec_(spec), runs_(std::move(runs)), budget_(budget),
        variant_(variant) {}

  ProjectionSpec spec_;
  std::vector<ProjectionOperator> runs_;
  PrivacyBudget budget_;
  SignOporpVariant variant_;
};

// Seed of repetition r out of t derived from the projection seed. With t == 1
// this is the projection seed itself.
uint64_t RepetitionSeed(uint64_t seed, int r, int t);

// Fills the sign-sketch provenance shared by the mechanisms above.
void AnnotateFlipProvenance(const FlipPlan& plan, Provenance* pv);

}  // namespace dprp

#endif  // DPRP_DP_SIGN_H_
