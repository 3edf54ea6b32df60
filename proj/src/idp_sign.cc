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

#include "dprp/idp_sign.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "dprp/mechanisms.h"
#include "dprp/normal.h"

namespace dprp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

NoiseIndicatorSet NoiseIndicators(std::span<const double> x, double beta,
                                  int k) {
  NoiseIndicatorSet out;
  out.indicators.resize(x.size());
  const double threshold = beta / std::sqrt(static_cast<double>(k));
  for (size_t j = 0; j < x.size(); ++j) {
    out.indicators[j] = threshold >= std::abs(x[j]) ? 1 : 0;
    out.n_tilde += out.indicators[j];
  }
  return out;
}

absl::StatusOr<NoiseIndicatorSet> NoiseIndicatorsFor(
    const ProjectionOperator& op, std::span<const double> u, double beta) {
  if (!op.spec().is_dense()) {
    return absl::InvalidArgumentError("noise indicators need a dense matrix");
  }
  if (static_cast<long long>(u.size()) != op.p()) {
    return absl::InvalidArgumentError("dimension mismatch");
  }
  Eigen::Map<const Eigen::VectorXd> uv(u.data(), op.p());
  const Eigen::VectorXd raw = op.matrix().transpose() * uv;
  NoiseIndicatorSet out;
  out.indicators.resize(op.k());
  for (int j = 0; j < op.k(); ++j) {
    // A relative slack of 1e-12 errs towards perturbing borderline bits.
    const double reach = beta * op.ColumnMaxAbs(j) * (1.0 + 1e-12);
    out.indicators[j] = reach >= std::abs(raw[j]) ? 1 : 0;
    out.n_tilde += out.indicators[j];
  }
  return out;
}

absl::StatusOr<IdpSignMechanism> IdpSignMechanism::Create(
    ProjectionOperator op, const PrivacyBudget& budget, IdpVariant variant,
    bool allow_general_dense) {
  PrivacyBudget checked = budget;
  if (variant == IdpVariant::kRr) checked.delta = 0;
  if (auto s = checked.Validate(); !s.ok()) return s;
  if (variant == IdpVariant::kGaussian && !(budget.delta > 0)) {
    return absl::InvalidArgumentError("iDP-SignRP-G requires delta > 0");
  }
  if (!op.spec().is_dense()) {
    return absl::InvalidArgumentError("iDP sign mechanisms need a dense RP");
  }
  if (!op.spec().is_rademacher() && !allow_general_dense) {
    return absl::InvalidArgumentError(
        "iDP sign mechanisms require a Rademacher projection; pass "
        "allow_general_dense to use another dense kind");
  }
  return IdpSignMechanism(std::move(op), budget, variant);
}

absl::StatusOr<IdpPlan> IdpSignMechanism::Plan(
    std::span<const double> u) const {
  auto ind = NoiseIndicatorsFor(op_, u, budget_.beta);
  if (!ind.ok()) return ind.status();
  auto x = op_.Project(u);
  if (!x.ok()) return x.status();
  IdpPlan plan;
  plan.indicators = *std::move(ind);
  plan.x = *std::move(x);
  const int k = op_.k();
  const int n = plan.indicators.n_tilde;
  if (variant_ == IdpVariant::kGaussian && n > 0) {
    double max_col = 0;
    for (int j = 0; j < k; ++j) max_col = std::max(max_col, op_.ColumnMaxAbs(j));
    const double delta2 =
        budget_.beta * max_col * std::sqrt(static_cast<double>(n) / k);
    auto sigma = OptimalGaussianSigma(delta2, budget_.epsilon, budget_.delta);
    if (!sigma.ok()) return sigma.status();
    plan.sigma = *sigma;
  }
  FlipPlan& f = plan.flips;
  f.derivation = FlipDerivation::kIdpRr;
  f.base_signs.resize(k);
  f.eps_prime.resize(k);
  f.coin.assign(k, 0);
  const double eps_prime = n > 0 ? budget_.epsilon / n : kInf;
  for (int j = 0; j < k; ++j) {
    f.base_signs[j] = SignOf(plan.x[j]);
    f.eps_prime[j] = plan.indicators.indicators[j] ? eps_prime : kInf;
  }
  return plan;
}

absl::StatusOr<BitLaw> IdpSignMechanism::LawFor(
    const IdpPlan& reference, std::span<const double> input) const {
  auto x = op_.Project(input);
  if (!x.ok()) return x.status();
  const int k = op_.k();
  BitLaw law;
  law.plus.resize(k);
  law.minus.resize(k);
  for (int j = 0; j < k; ++j) {
    const bool perturbed = reference.indicators.indicators[j] != 0;
    const double v = (*x)[j];
    if (!perturbed) {
      law.plus[j] = v < 0 ? 0.0 : 1.0;
      law.minus[j] = v < 0 ? 1.0 : 0.0;
    } else if (variant_ == IdpVariant::kGaussian) {
      // sign(v + G) with sign(0) = +1.
      law.plus[j] = NormalCdf(v / reference.sigma);
      law.minus[j] = NormalCdf(-v / reference.sigma);
    } else {
      const double keep = RrKeepProbability(reference.flips.eps_prime[j]);
      const double flip = RrFlipProbability(reference.flips.eps_prime[j]);
      law.plus[j] = v < 0 ? flip : keep;
      law.minus[j] = v < 0 ? keep : flip;
    }
  }
  return law;
}

absl::StatusOr<Sketch> IdpSignMechanism::Privatize(const DataVector& u,
                                                   RngStream& rng) const {
  auto plan = Plan(u.values());
  if (!plan.ok()) return plan.status();
  Sketch sk;
  sk.payload = Sketch::Payload::kSign;
  Provenance& pv = sk.provenance;
  if (variant_ == IdpVariant::kGaussian) {
    sk.signs.resize(plan->x.size());
    for (size_t j = 0; j < plan->x.size(); ++j) {
      double v = plan->x[j];
      if (plan->indicators.indicators[j]) v += plan->sigma * rng.Gaussian();
      sk.signs[j] = SignOf(v);
    }
    pv.mechanism = "idp_signrp_g";
    pv.sigma = plan->sigma;
  } else {
    sk.signs = plan->flips.Sample(rng);
    pv.mechanism = "idp_signrp_rr";
    if (plan->indicators.n_tilde > 0) {
      pv.eps_prime = budget_.epsilon / plan->indicators.n_tilde;
    }
  }
  pv.spec_digest = op_.spec().Digest();
  pv.projection_kind = ProjectionTag(op_.spec());
  pv.is_private = true;
  pv.budget = budget_;
  if (variant_ == IdpVariant::kRr) pv.budget.delta = 0;
  pv.n_plus = plan->indicators.n_tilde;
  pv.vacuous_budget = plan->indicators.n_tilde == 0;
  pv.notes.push_back("individual DP: guarantee holds for this input only");
  return sk;
}

}  // namespace dprp
