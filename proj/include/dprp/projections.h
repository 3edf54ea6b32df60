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

// Public projection operators and sketches.
//
// Dense kinds compute x = W^T u / sqrt(k) for a p x k matrix W. OPORP permutes
// the (zero-padded) coordinates once, multiplies by one Rademacher vector and
// sums fixed-length consecutive bins; its output is not rescaled.

#ifndef DPRP_PROJECTIONS_H_
#define DPRP_PROJECTIONS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dprp/core.h"

namespace dprp {

enum class ProjectionKind { kGaussian, kUniform, kVerySparse, kOporp };

std::string ProjectionKindName(ProjectionKind kind);
absl::StatusOr<ProjectionKind> ParseProjectionKind(std::string_view name);

struct ProjectionSpec {
  ProjectionKind kind = ProjectionKind::kGaussian;
  long long p = 0;
  int k = 0;
  // Sparsity of kVerySparse: entries are +-sqrt(s) w.p. 1/(2s) each, else 0.
  double s = 1.0;
  uint64_t seed = 0;

  static ProjectionSpec Gaussian(long long p, int k, uint64_t seed);
  static ProjectionSpec Rademacher(long long p, int k, uint64_t seed);
  static ProjectionSpec Oporp(long long p, int k, uint64_t seed);

  bool is_dense() const { return kind != ProjectionKind::kOporp; }
  // Very sparse with s == 1.
  bool is_rademacher() const;
  absl::Status Validate() const;
  // Stable content hash of every field.
  std::string Digest() const;
};

// Kind name recorded in provenance: "rademacher" for very sparse with s = 1,
// otherwise ProjectionKindName().
std::string ProjectionTag(const ProjectionSpec& spec);

// Materialized operator. Immutable after construction and safe to share.
class ProjectionOperator {
 public:
  static absl::StatusOr<ProjectionOperator> Materialize(
      const ProjectionSpec& spec);
  // Dense operator with an explicit p x k matrix.
  static absl::StatusOr<ProjectionOperator> FromMatrix(
      const ProjectionSpec& spec, Eigen::MatrixXd w);
  // OPORP operator with an explicit permutation of the padded coordinates
  // (position[i] is where coordinate i lands) and a +-1 vector indexed by
  // position.
  static absl::StatusOr<ProjectionOperator> FromOporpParts(
      const ProjectionSpec& spec, std::vector<int> position,
      std::vector<double> w);

  const ProjectionSpec& spec() const { return spec_; }
  long long p() const { return spec_.p; }
  int k() const { return spec_.k; }

  // Dense kinds only.
  const Eigen::MatrixXd& matrix() const { return w_; }
  // max_i |W_ij| (unscaled). For OPORP this is 1 for every bin.
  double ColumnMaxAbs(int j) const;

  // OPORP only.
  long long padded_dim() const { return padded_; }
  long long bin_width() const { return padded_ / spec_.k; }
  const std::vector<int>& position() const { return position_; }
  const std::vector<double>& oporp_signs() const { return oporp_w_; }
  int BinOf(long long coordinate) const;

  // Equivalent p x k matrix with the output scaling folded in, so that
  // Project(u) == EffectiveMatrix()^T u for every kind.
  Eigen::MatrixXd EffectiveMatrix() const;

  // Real projection of u (any finite vector of length p).
  absl::StatusOr<std::vector<double>> Project(std::span<const double> u) const;

 private:
  explicit ProjectionOperator(ProjectionSpec spec) : spec_(spec) {}

  ProjectionSpec spec_;
  Eigen::MatrixXd w_;
  std::vector<double> column_max_;
  long long padded_ = 0;
  std::vector<int> position_;
  std::vector<double> oporp_w_;
};

struct Provenance {
  // "non-private" for plain sketches, otherwise the mechanism name.
  std::string mechanism = "non-private";
  // Empty for raw-data mechanisms.
  std::string spec_digest;
  std::string projection_kind;
  bool is_private = false;
  PrivacyBudget budget;
  // Calibration actually used. Zero when not applicable.
  double sigma = 0;
  double lambda = 0;
  double delta1 = 0;
  double delta2 = 0;
  std::string sensitivity_basis;
  // Homogeneous per-bit budget of randomized response, if any.
  std::optional<double> eps_prime;
  // Set when per-bit budgets differ (smooth variants).
  bool heterogeneous_flips = false;
  std::optional<int> n_plus;
  // histogram[l] = number of bits with L_j == l (index 0 unused).
  std::vector<int> lj_histogram;
  // Indices whose real value was exactly zero at sign extraction.
  std::vector<int> zero_indices;
  bool vacuous_budget = false;
  std::vector<std::string> notes;
};

struct Sketch {
  enum class Payload { kReal, kSign };

  Payload payload = Payload::kReal;
  std::vector<double> values;
  std::vector<int8_t> signs;
  Provenance provenance;

  bool is_sign() const { return payload == Payload::kSign; }
  size_t size() const { return is_sign() ? signs.size() : values.size(); }
};

// Non-private sketch of u.
absl::StatusOr<Sketch> ProjectVector(const ProjectionOperator& op,
                                     const DataVector& u);

// sign(x) with sign(0) = +1; indices of exact zeros are recorded.
absl::StatusOr<Sketch> TakeSigns(const Sketch& real);

inline int8_t SignOf(double x) { return x < 0 ? -1 : 1; }

}  // namespace dprp

#endif  // DPRP_PROJECTIONS_H_
