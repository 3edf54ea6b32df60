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

// Full-precision private sketches: a projection (or the raw vector) plus
// calibrated Gaussian or Laplace noise.

#ifndef DPRP_DP_RP_H_
#define DPRP_DP_RP_H_

#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "dprp/core.h"
#include "dprp/mechanisms.h"
#include "dprp/projections.h"
#include "dprp/rng.h"

namespace dprp {

enum class DpRpVariant {
  // Optimal Gaussian noise on the raw vector, Delta_2 = beta.
  kRawGOpt,
  // Dense projection, classic Gaussian calibration.
  kRpG,
  // Dense projection, optimal Gaussian calibration.
  kRpGOpt,
  // Dense projection, Laplace noise from the exact Delta_1.
  kRpL,
  // Rademacher projection, optimal Gaussian calibration with Delta_2 = beta.
  kRpGOptB,
  // OPORP, optimal Gaussian calibration with Delta_2 = beta.
  kOporp,
};

std::string DpRpVariantName(DpRpVariant v);
absl::StatusOr<DpRpVariant> ParseDpRpVariant(std::string_view name);

enum class SensitivityMode {
  // Exact from the realized matrix for Gaussian/uniform/sparse projections,
  // closed form (beta) for Rademacher, OPORP and raw data.
  kDefault,
  // Always computed from the realized matrix.
  kExactFromMatrix,
  // High-probability bound on Delta_2 for Gaussian projections, spending
  // delta/2 on the bound and delta/2 on the mechanism.
  kAnalyticBound,
};

struct DpRpConfig {
  DpRpVariant variant = DpRpVariant::kRpGOpt;
  // Ignored except for p when variant is kRawGOpt.
  ProjectionSpec spec;
  PrivacyBudget budget;
  SensitivityMode mode = SensitivityMode::kDefault;

  absl::Status Validate() const;
};

// The sensitivity and noise scale a mechanism would use for a given operator.
// `op` may be null for kRawGOpt.
struct DpRpCalibration {
  Sensitivity sensitivity;
  NoiseCalibration noise;
};

absl::StatusOr<DpRpCalibration> AuditNoiseScale(const DpRpConfig& cfg,
                                                const ProjectionOperator* op);

class DpRpMechanism {
 public:
  // Materializes the configured projection and calibrates once.
  static absl::StatusOr<DpRpMechanism> Create(const DpRpConfig& cfg);
  // Uses an existing operator, which must match cfg.spec.
  static absl::StatusOr<DpRpMechanism> Create(const DpRpConfig& cfg,
                                              ProjectionOperator op);

  const DpRpConfig& config() const { return cfg_; }
  const DpRpCalibration& calibration() const { return calibration_; }
  const ProjectionOperator* projection() const {
    return op_ ? &*op_ : nullptr;
  }

  // Output length is p for kRawGOpt and k otherwise.
  absl::StatusOr<Sketch> Privatize(const DataVector& u, RngStream& rng) const;

 private:
  DpRpMechanism(DpRpConfig cfg, std::optional<ProjectionOperator> op,
                DpRpCalibration calibration)
      : cfg_(std::move(cfg)), op_(std::move(op)),
        calibration_(calibration) {}

  DpRpConfig cfg_;
  std::optional<ProjectionOperator> op_;
  DpRpCalibration calibration_;
};

}  // namespace dprp

#endif  // DPRP_DP_RP_H_
