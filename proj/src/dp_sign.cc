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

#include "dprp/dp_sign.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace dprp {
namespace {

constexpr double kLevelTolerance = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double BitLaw::Probability(std::span<const int8_t> bits) const {
  double prob = 1.0;
  for (size_t j = 0; j < bits.size(); ++j) {
    prob *= bits[j] > 0 ? plus[j] : minus[j];
  }
  return prob;
}

std::string FlipDerivationName(FlipDerivation d) {
  switch (d) {
    case FlipDerivation::kRr:
      return "rr";
    case FlipDerivation::kSmooth:
      return "smooth";
    case FlipDerivation::kOporpRr:
      return "oporp_rr";
    case FlipDerivation::kOporpSmooth:
      return "oporp_smooth";
    case FlipDerivation::kIdpRr:
      return "idp_rr";
  }
  return "unknown";
}

double RrFlipProbability(double eps) {
  if (std::isinf(eps)) return 0.0;
  return 1.0 / (std::exp(eps) + 1.0);
}

double RrKeepProbability(double eps) {
  if (std::isinf(eps)) return 1.0;
  return 1.0 / (1.0 + std::exp(-eps));
}

int SmoothLevel(double ratio) {
  const double level = std::ceil(ratio - kLevelTolerance);
  if (!(level >= 1)) return 1;
  if (level > std::numeric_limits<int>::max()) {
    return std::numeric_limits<int>::max();
  }
  return static_cast<int>(level);
}

double FlipPlan::KeepProbability(size_t j) const {
  if (coin[j]) return 0.5;
  return RrKeepProbability(eps_prime[j]);
}

double FlipPlan::FlipProbability(size_t j) const {
  if (coin[j]) return 0.5;
  return RrFlipProbability(eps_prime[j]);
}

BitLaw FlipPlan::Law() const {
  BitLaw law;
  law.plus.resize(size());
  law.minus.resize(size());
  for (size_t j = 0; j < size(); ++j) {
    const double keep = KeepProbability(j);
    const double flip = FlipProbability(j);
    law.plus[j] = base_signs[j] > 0 ? keep : flip;
    law.minus[j] = base_signs[j] > 0 ? flip : keep;
  }
  return law;
}

std::vector<int8_t> FlipPlan::Sample(RngStream& rng) const {
  std::vector<int8_t> out(size());
  for (size_t j = 0; j < size(); ++j) {
    if (coin[j]) {
      out[j] = static_cast<int8_t>(rng.Rademacher());
      continue;
    }
    const double flip = RrFlipProbability(eps_prime[j]);
    const bool flipped = flip > 0 && rng.Uniform() < flip;
    out[j] = flipped ? static_cast<int8_t>(-base_signs[j]) : base_signs[j];
  }
  return out;
}

void AnnotateFlipProvenance(const FlipPlan& plan, Provenance* pv) {
  if (!plan.lj.empty()) {
    pv->heterogeneous_flips = true;
    int max_level = 0;
    for (int l : plan.lj) max_level = std::max(max_level, l);
    pv->lj_histogram.assign(max_level + 1, 0);
    for (int l : plan.lj) ++pv->lj_histogram[l];
    pv->eps_prime.reset();
    return;
  }
  for (size_t j = 0; j < plan.size(); ++j) {
    if (!plan.coin[j]) {
      pv->eps_prime = plan.eps_prime[j];
      break;
    }
  }
}

absl::StatusOr<SignRpMechanism> SignRpMechanism::Create(
    ProjectionOperator op, const PrivacyBudget& budget, SignRpVariant variant,
    double norm_lower_bound) {
  const bool smooth = variant == SignRpVariant::kRrSmooth;
  if (auto s = budget.Validate(/*pure=*/smooth); !s.ok()) return s;
  if (!op.spec().is_dense()) {
    return absl::InvalidArgumentError("SignRP requires a dense projection");
  }
  const int k = op.k();
  if (smooth) {
    return SignRpMechanism(std::move(op), budget, variant, 0, k,
                           budget.epsilon / k);
  }
  const double m = norm_lower_bound;
  if (!(m >= 0) || !std::isfinite(m)) {
    return absl::InvalidArgumentError(
        absl::StrCat("norm lower bound m must be >= 0, got ", m));
  }
  if (m < budget.beta || m == 0) {
    // N+ bound unavailable: every sign may change, so eps' = eps / k.
    SignRpMechanism mech(std::move(op), budget, variant, m, k,
                         budget.epsilon / k);
    mech.notes_.push_back("m < beta: pure fallback with N+ = k");
    return mech;
  }
  if (!(budget.delta > 0)) {
    return absl::InvalidArgumentError(
        "delta must be positive when m >= beta (the N+ bound holds with "
        "probability 1 - delta)");
  }
  NPlusFlavor flavor;
  if (op.spec().kind == ProjectionKind::kGaussian) {
    flavor = NPlusFlavor::kGaussian;
  } else if (op.spec().is_rademacher()) {
    flavor = NPlusFlavor::kRademacher;
  } else {
    return absl::InvalidArgumentError(
        "the N+ bound is available for Gaussian and Rademacher projections "
        "only");
  }
  auto np = NPlusBound(m, budget.beta, budget.delta, k, op.p(), flavor);
  if (!np.ok()) return np.status();
  return SignRpMechanism(std::move(op), budget, variant, m, np->value,
                         budget.epsilon / np->value);
}

absl::StatusOr<FlipPlan> SignRpMechanism::Plan(
    std::span<const double> u) const {
  if (static_cast<long long>(u.size()) != op_.p()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: vector has ", u.size(), " entries, projection "
        "expects ", op_.p()));
  }
  const int k = op_.k();
  Eigen::Map<const Eigen::VectorXd> uv(u.data(), op_.p());
  // Unscaled projections; the 1/sqrt(k) factor cancels in the level ratio.
  const Eigen::VectorXd raw = op_.matrix().transpose() * uv;
  FlipPlan plan;
  plan.base_signs.resize(k);
  plan.eps_prime.resize(k);
  plan.coin.assign(k, 0);
  const bool smooth = variant_ == SignRpVariant::kRrSmooth;
  plan.derivation = smooth ? FlipDerivation::kSmooth : FlipDerivation::kRr;
  if (smooth) plan.lj.resize(k);
  for (int j = 0; j < k; ++j) {
    plan.base_signs[j] = SignOf(raw[j]);
    if (smooth) {
      const double denom = budget_.beta * op_.ColumnMaxAbs(j);
      const int level =
          denom > 0 ? SmoothLevel(std::abs(raw[j]) / denom)
                    : std::numeric_limits<int>::max();
      plan.lj[j] = level;
      plan.eps_prime[j] = level * budget_.epsilon / k;
    } else {
      plan.eps_prime[j] = eps_prime_;
    }
  }
  return plan;
}

absl::StatusOr<Sketch> SignRpMechanism::Privatize(const DataVector& u,
                                                  RngStream& rng) const {
  if (variant_ == SignRpVariant::kRr && u.Norm() < m_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "data norm ", u.Norm(), " is below the declared lower bound m=", m_));
  }
  auto plan = Plan(u.values());
  if (!plan.ok()) return plan.status();
  Sketch sk;
  sk.payload = Sketch::Payload::kSign;
  sk.signs = plan->Sample(rng);
  Provenance& pv = sk.provenance;
  pv.mechanism = variant_ == SignRpVariant::kRr ? "signrp_rr"
                                                 : "signrp_rr_smooth";
  pv.spec_digest = op_.spec().Digest();
  pv.projection_kind = ProjectionTag(op_.spec());
  pv.is_private = true;
  pv.budget = budget_;
  if (variant_ == SignRpVariant::kRr) pv.n_plus = n_plus_;
  pv.notes = notes_;
  AnnotateFlipProvenance(*plan, &pv);
  return sk;
}

uint64_t RepetitionSeed(uint64_t seed, int r, int t) {
  if (t == 1) return seed;
  return Mix64(seed ^ Mix64(0x5eed0000ULL + static_cast<uint64_t>(r)));
}

absl::StatusOr<SignOporpMechanism> SignOporpMechanism::Create(
    const ProjectionSpec& spec, const PrivacyBudget& budget,
    SignOporpVariant variant) {
  if (auto s = budget.Validate(/*pure=*/true); !s.ok()) return s;
  if (auto s = spec.Validate(); !s.ok()) return s;
  if (spec.kind != ProjectionKind::kOporp) {
    return absl::InvalidArgumentError("SignOPORP requires kind oporp");
  }
  const int t = budget.repetitions;
  if (spec.k % t != 0) {
    return absl::InvalidArgumentError(absl::StrCat(
        "repetitions t=", t, " must divide k=", spec.k));
  }
  std::vector<ProjectionOperator> runs;
  for (int r = 0; r < t; ++r) {
    auto op = ProjectionOperator::Materialize(ProjectionSpec::Oporp(
        spec.p, spec.k / t, RepetitionSeed(spec.seed, r, t)));
    if (!op.ok()) return op.status();
    runs.push_back(*std::move(op));
  }
  return SignOporpMechanism(spec, std::move(runs), budget, variant);
}

absl::StatusOr<SignOporpMechanism> SignOporpMechanism::Create(
    std::vector<ProjectionOperator> runs, const PrivacyBudget& budget,
    SignOporpVariant variant) {
  if (auto s = budget.Validate(/*pure=*/true); !s.ok()) return s;
  if (runs.empty() || static_cast<int>(runs.size()) != budget.repetitions) {
    return absl::InvalidArgumentError(
        "number of runs must equal the repetition count");
  }
  int k = 0;
  for (const auto& r : runs) {
    if (r.spec().kind != ProjectionKind::kOporp || r.p() != runs[0].p() ||
        r.k() != runs[0].k()) {
      return absl::InvalidArgumentError(
          "runs must be OPORP operators of equal shape");
    }
    k += r.k();
  }
  ProjectionSpec spec =
      ProjectionSpec::Oporp(runs[0].p(), k, runs[0].spec().seed);
  return SignOporpMechanism(spec, std::move(runs), budget, variant);
}

int SignOporpMechanism::k() const {
  int k = 0;
  for (const auto& r : runs_) k += r.k();
  return k;
}

absl::StatusOr<FlipPlan> SignOporpMechanism::Plan(
    std::span<const double> u) const {
  const int t = static_cast<int>(runs_.size());
  const double eps_run = budget_.epsilon / t;
  const bool smooth = variant_ == SignOporpVariant::kRrSmooth;
  FlipPlan plan;
  plan.derivation =
      smooth ? FlipDerivation::kOporpSmooth : FlipDerivation::kOporpRr;
  for (const auto& run : runs_) {
    auto x = run.Project(u);
    if (!x.ok()) return x.status();
    for (double v : *x) {
      const bool empty = v == 0;
      const int level = empty ? 1 : SmoothLevel(std::abs(v) / budget_.beta);
      plan.base_signs.push_back(SignOf(v));
      plan.coin.push_back(empty ? 1 : 0);
      plan.eps_prime.push_back(smooth ? level * eps_run : eps_run);
      if (smooth) plan.lj.push_back(level);
    }
  }
  return plan;
}

absl::StatusOr<Sketch> SignOporpMechanism::Privatize(const DataVector& u,
                                                     RngStream& rng) const {
  auto plan = Plan(u.values());
  if (!plan.ok()) return plan.status();
  Sketch sk;
  sk.payload = Sketch::Payload::kSign;
  sk.signs = plan->Sample(rng);
  Provenance& pv = sk.provenance;
  pv.mechanism = variant_ == SignOporpVariant::kRr ? "signoporp_rr"
                                                   : "signoporp_rr_smooth";
  pv.spec_digest = spec_.Digest();
  pv.projection_kind = ProjectionTag(spec_);
  pv.is_private = true;
  pv.budget = budget_;
  for (size_t j = 0; j < plan->size(); ++j) {
    if (plan->coin[j]) pv.zero_indices.push_back(static_cast<int>(j));
  }
  AnnotateFlipProvenance(*plan, &pv);
  return sk;
}

}  // namespace dprp
