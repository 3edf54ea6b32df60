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

#include "dprp/dp_rp.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace dprp {
namespace {

bool UsesLaplace(DpRpVariant v) { return v == DpRpVariant::kRpL; }

}  // namespace

std::string DpRpVariantName(DpRpVariant v) {
  switch (v) {
    case DpRpVariant::kRawGOpt:
      return "raw_g_opt";
    case DpRpVariant::kRpG:
      return "rp_g";
    case DpRpVariant::kRpGOpt:
      return "rp_g_opt";
    case DpRpVariant::kRpL:
      return "rp_l";
    case DpRpVariant::kRpGOptB:
      return "rp_g_opt_b";
    case DpRpVariant::kOporp:
      return "oporp";
  }
  return "unknown";
}

absl::StatusOr<DpRpVariant> ParseDpRpVariant(std::string_view name) {
  for (DpRpVariant v :
       {DpRpVariant::kRawGOpt, DpRpVariant::kRpG, DpRpVariant::kRpGOpt,
        DpRpVariant::kRpL, DpRpVariant::kRpGOptB, DpRpVariant::kOporp}) {
    if (name == DpRpVariantName(v)) return v;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown variant '", std::string(name),
      "'; expected one of raw_g_opt, rp_g, rp_g_opt, rp_l, rp_g_opt_b, oporp"));
}

absl::Status DpRpConfig::Validate() const {
  const bool laplace = UsesLaplace(variant);
  if (auto s = budget.Validate(/*pure=*/laplace); !s.ok()) return s;
  if (!laplace && !(budget.delta > 0)) {
    return absl::InvalidArgumentError(
        "delta must be positive for Gaussian mechanisms");
  }
  if (variant == DpRpVariant::kRpG && !(budget.delta < 0.5)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "delta out of range for classic mechanism: need delta < 1/2, got ",
        budget.delta));
  }
  if (variant == DpRpVariant::kRawGOpt) {
    if (spec.p < 1) return absl::InvalidArgumentError("p must be >= 1");
    return absl::OkStatus();
  }
  if (auto s = spec.Validate(); !s.ok()) return s;
  switch (variant) {
    case DpRpVariant::kRpGOptB:
      if (!spec.is_rademacher()) {
        return absl::InvalidArgumentError(
            "rp_g_opt_b requires a Rademacher projection (very_sparse, s=1)");
      }
      break;
    case DpRpVariant::kOporp:
      if (spec.kind != ProjectionKind::kOporp) {
        return absl::InvalidArgumentError("variant oporp requires kind oporp");
      }
      break;
    default:
      if (!spec.is_dense()) {
        return absl::InvalidArgumentError(absl::StrCat(
            DpRpVariantName(variant), " requires a dense projection kind"));
      }
  }
  if (mode == SensitivityMode::kAnalyticBound) {
    if (spec.kind != ProjectionKind::kGaussian ||
        (variant != DpRpVariant::kRpG && variant != DpRpVariant::kRpGOpt)) {
      return absl::InvalidArgumentError(
          "analytic-bound mode applies to rp_g and rp_g_opt with Gaussian "
          "projections only");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<DpRpCalibration> AuditNoiseScale(const DpRpConfig& cfg,
                                                const ProjectionOperator* op) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  const PrivacyBudget& b = cfg.budget;
  DpRpCalibration out;
  out.noise.epsilon = b.epsilon;
  out.noise.delta = b.delta;

  const bool closed_form =
      cfg.variant == DpRpVariant::kRawGOpt ||
      cfg.variant == DpRpVariant::kOporp ||
      cfg.variant == DpRpVariant::kRpGOptB ||
      (cfg.mode == SensitivityMode::kDefault && cfg.spec.is_rademacher() &&
       cfg.variant != DpRpVariant::kRpL);
  if (cfg.mode == SensitivityMode::kAnalyticBound) {
    auto l2 = SensitivityL2Bound(cfg.spec.p, cfg.spec.k, b.beta, b.delta / 2);
    if (!l2.ok()) return l2.status();
    out.sensitivity.l2 = *l2;
    out.sensitivity.basis = SensitivityBasis::kHighProbabilityBound;
    out.sensitivity.delta_share = b.delta / 2;
    auto sigma = cfg.variant == DpRpVariant::kRpG
                     ? ClassicGaussianSigma(*l2, b.epsilon, b.delta / 2)
                     : OptimalGaussianSigma(*l2, b.epsilon, b.delta / 2);
    if (!sigma.ok()) return sigma.status();
    out.noise.distribution = NoiseDistribution::kGaussian;
    out.noise.scale = *sigma;
    return out;
  }
  if (closed_form && cfg.mode != SensitivityMode::kExactFromMatrix) {
    out.sensitivity.l2 = b.beta;
    out.sensitivity.basis = SensitivityBasis::kClosedForm;
  } else {
    if (op == nullptr) {
      return absl::InvalidArgumentError(
          "exact sensitivity requires a materialized projection");
    }
    const bool dense = op->spec().is_dense();
    auto s = SensitivityFromMatrix(
        dense ? op->matrix() : op->EffectiveMatrix(), b.beta);
    if (!s.ok()) return s.status();
    out.sensitivity = *s;
    if (!dense) {
      // OPORP output is unscaled, so undo the 1/sqrt(k) factor.
      const double root_k = std::sqrt(static_cast<double>(op->k()));
      out.sensitivity.l1 *= root_k;
      out.sensitivity.l2 *= root_k;
    }
  }
  absl::StatusOr<double> scale;
  switch (cfg.variant) {
    case DpRpVariant::kRpL:
      out.noise.distribution = NoiseDistribution::kLaplace;
      scale = LaplaceLambda(out.sensitivity.l1, b.epsilon);
      break;
    case DpRpVariant::kRpG:
      out.noise.distribution = NoiseDistribution::kGaussian;
      scale = ClassicGaussianSigma(out.sensitivity.l2, b.epsilon, b.delta);
      break;
    default:
      out.noise.distribution = NoiseDistribution::kGaussian;
      scale = OptimalGaussianSigma(out.sensitivity.l2, b.epsilon, b.delta);
  }
  if (!scale.ok()) return scale.status();
  out.noise.scale = *scale;
  return out;
}

absl::StatusOr<DpRpMechanism> DpRpMechanism::Create(const DpRpConfig& cfg) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  if (cfg.variant == DpRpVariant::kRawGOpt) {
    auto cal = AuditNoiseScale(cfg, nullptr);
    if (!cal.ok()) return cal.status();
    return DpRpMechanism(cfg, std::nullopt, *cal);
  }
  auto op = ProjectionOperator::Materialize(cfg.spec);
  if (!op.ok()) return op.status();
  return Create(cfg, *std::move(op));
}

absl::StatusOr<DpRpMechanism> DpRpMechanism::Create(const DpRpConfig& cfg,
                                                    ProjectionOperator op) {
  if (auto s = cfg.Validate(); !s.ok()) return s;
  if (cfg.variant == DpRpVariant::kRawGOpt) return Create(cfg);
  if (op.spec().Digest() != cfg.spec.Digest()) {
    return absl::InvalidArgumentError(
        "projection operator does not match the configured spec");
  }
  auto cal = AuditNoiseScale(cfg, &op);
  if (!cal.ok()) return cal.status();
  return DpRpMechanism(cfg, std::move(op), *cal);
}

absl::StatusOr<Sketch> DpRpMechanism::Privatize(const DataVector& u,
                                                RngStream& rng) const {
  Sketch sk;
  sk.payload = Sketch::Payload::kReal;
  if (op_) {
    auto x = op_->Project(u.values());
    if (!x.ok()) return x.status();
    sk.values = *std::move(x);
    sk.provenance.spec_digest = op_->spec().Digest();
    sk.provenance.projection_kind = ProjectionTag(op_->spec());
  } else {
    if (static_cast<long long>(u.size()) != cfg_.spec.p) {
      return absl::InvalidArgumentError(absl::StrCat(
          "dimension mismatch: vector has ", u.size(), " entries, expected ",
          cfg_.spec.p));
    }
    sk.values.assign(u.values().begin(), u.values().end());
    sk.provenance.projection_kind = "raw";
  }
  const NoiseCalibration& noise = calibration_.noise;
  if (noise.distribution == NoiseDistribution::kGaussian) {
    for (double& v : sk.values) v += noise.scale * rng.Gaussian();
    sk.provenance.sigma = noise.scale;
  } else {
    for (double& v : sk.values) v += rng.Laplace(noise.scale);
    sk.provenance.lambda = noise.scale;
  }
  Provenance& pv = sk.provenance;
  pv.mechanism = DpRpVariantName(cfg_.variant);
  pv.is_private = true;
  pv.budget = cfg_.budget;
  pv.delta1 = calibration_.sensitivity.l1;
  pv.delta2 = calibration_.sensitivity.l2;
  pv.sensitivity_basis = SensitivityBasisName(calibration_.sensitivity.basis);
  return sk;
}

}  // namespace dprp
