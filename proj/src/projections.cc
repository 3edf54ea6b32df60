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

#include "dprp/projections.h"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "dprp/rng.h"

namespace dprp {

std::string ProjectionKindName(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::kGaussian:
      return "gaussian";
    case ProjectionKind::kUniform:
      return "uniform";
    case ProjectionKind::kVerySparse:
      return "very_sparse";
    case ProjectionKind::kOporp:
      return "oporp";
  }
  return "unknown";
}

absl::StatusOr<ProjectionKind> ParseProjectionKind(std::string_view name) {
  if (name == "gaussian") return ProjectionKind::kGaussian;
  if (name == "uniform") return ProjectionKind::kUniform;
  if (name == "very_sparse" || name == "rademacher") {
    return ProjectionKind::kVerySparse;
  }
  if (name == "oporp") return ProjectionKind::kOporp;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown projection kind '", std::string(name),
                   "'; expected one of gaussian, uniform, very_sparse, "
                   "rademacher, oporp"));
}

ProjectionSpec ProjectionSpec::Gaussian(long long p, int k, uint64_t seed) {
  return {ProjectionKind::kGaussian, p, k, 1.0, seed};
}

ProjectionSpec ProjectionSpec::Rademacher(long long p, int k, uint64_t seed) {
  return {ProjectionKind::kVerySparse, p, k, 1.0, seed};
}

ProjectionSpec ProjectionSpec::Oporp(long long p, int k, uint64_t seed) {
  return {ProjectionKind::kOporp, p, k, 1.0, seed};
}

bool ProjectionSpec::is_rademacher() const {
  return kind == ProjectionKind::kVerySparse && s == 1.0;
}

absl::Status ProjectionSpec::Validate() const {
  if (p < 1) return absl::InvalidArgumentError(absl::StrCat("p must be >= 1, got ", p));
  if (k < 1) return absl::InvalidArgumentError(absl::StrCat("k must be >= 1, got ", k));
  if (kind == ProjectionKind::kVerySparse && !(s >= 1.0 && std::isfinite(s))) {
    return absl::InvalidArgumentError(
        absl::StrCat("sparsity s must be >= 1, got ", s));
  }
  if (kind == ProjectionKind::kOporp && k > p) {
    return absl::InvalidArgumentError(
        absl::StrCat("oporp requires k <= p, got k=", k, " p=", p));
  }
  return absl::OkStatus();
}

std::string ProjectionSpec::Digest() const {
  char s_hex[32];
  std::snprintf(s_hex, sizeof(s_hex), "%a", s);
  return DigestOfString(absl::StrCat(ProjectionKindName(kind), "|", p, "|", k,
                                     "|", s_hex, "|", seed));
}

std::string ProjectionTag(const ProjectionSpec& spec) {
  return spec.is_rademacher() ? "rademacher" : ProjectionKindName(spec.kind);
}

absl::StatusOr<ProjectionOperator> ProjectionOperator::Materialize(
    const ProjectionSpec& spec) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  RngStream rng(spec.seed, kProjectionStream);
  if (spec.kind == ProjectionKind::kOporp) {
    const long long padded = (spec.p + spec.k - 1) / spec.k * spec.k;
    std::vector<int> perm(padded);
    std::iota(perm.begin(), perm.end(), 0);
    for (long long i = padded - 1; i > 0; --i) {
      std::swap(perm[i], perm[rng.Below(i + 1)]);
    }
    std::vector<double> w(padded);
    for (auto& v : w) v = rng.Rademacher();
    return FromOporpParts(spec, std::move(perm), std::move(w));
  }
  Eigen::MatrixXd w(spec.p, spec.k);
  const double root3 = std::sqrt(3.0);
  const double root_s = std::sqrt(spec.s);
  const double half_mass = 0.5 / spec.s;
  for (long long i = 0; i < spec.p; ++i) {
    for (int j = 0; j < spec.k; ++j) {
      double v = 0;
      switch (spec.kind) {
        case ProjectionKind::kGaussian:
          v = rng.Gaussian();
          break;
        case ProjectionKind::kUniform:
          v = root3 * (2.0 * rng.Uniform() - 1.0);
          break;
        case ProjectionKind::kVerySparse: {
          const double u = rng.Uniform();
          v = u < half_mass ? root_s : (u < 2 * half_mass ? -root_s : 0.0);
          break;
        }
        case ProjectionKind::kOporp:
          break;
      }
      w(i, j) = v;
    }
  }
  return FromMatrix(spec, std::move(w));
}

absl::StatusOr<ProjectionOperator> ProjectionOperator::FromMatrix(
    const ProjectionSpec& spec, Eigen::MatrixXd w) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  if (!spec.is_dense()) {
    return absl::InvalidArgumentError("FromMatrix requires a dense kind");
  }
  if (w.rows() != spec.p || w.cols() != spec.k) {
    return absl::InvalidArgumentError(absl::StrCat(
        "matrix is ", w.rows(), "x", w.cols(), ", spec wants ", spec.p, "x",
        spec.k));
  }
  ProjectionOperator op(spec);
  op.column_max_.resize(spec.k);
  for (int j = 0; j < spec.k; ++j) {
    op.column_max_[j] = w.col(j).cwiseAbs().maxCoeff();
  }
  op.w_ = std::move(w);
  return op;
}

absl::StatusOr<ProjectionOperator> ProjectionOperator::FromOporpParts(
    const ProjectionSpec& spec, std::vector<int> position,
    std::vector<double> w) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  if (spec.kind != ProjectionKind::kOporp) {
    return absl::InvalidArgumentError("FromOporpParts requires kind oporp");
  }
  const long long padded = (spec.p + spec.k - 1) / spec.k * spec.k;
  if (static_cast<long long>(position.size()) != padded ||
      static_cast<long long>(w.size()) != padded) {
    return absl::InvalidArgumentError(absl::StrCat(
        "oporp parts must have padded length ", padded));
  }
  std::vector<bool> seen(padded, false);
  for (int pos : position) {
    if (pos < 0 || pos >= padded || seen[pos]) {
      return absl::InvalidArgumentError("position is not a permutation");
    }
    seen[pos] = true;
  }
  for (double v : w) {
    if (v != 1.0 && v != -1.0) {
      return absl::InvalidArgumentError("oporp vector entries must be +-1");
    }
  }
  ProjectionOperator op(spec);
  op.padded_ = padded;
  op.position_ = std::move(position);
  op.oporp_w_ = std::move(w);
  op.column_max_.assign(spec.k, 1.0);
  return op;
}

double ProjectionOperator::ColumnMaxAbs(int j) const { return column_max_[j]; }

int ProjectionOperator::BinOf(long long coordinate) const {
  return static_cast<int>(position_[coordinate] / bin_width());
}

Eigen::MatrixXd ProjectionOperator::EffectiveMatrix() const {
  if (spec_.is_dense()) {
    return w_ / std::sqrt(static_cast<double>(spec_.k));
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(spec_.p, spec_.k);
  for (long long i = 0; i < spec_.p; ++i) {
    m(i, BinOf(i)) = oporp_w_[position_[i]];
  }
  return m;
}

absl::StatusOr<std::vector<double>> ProjectionOperator::Project(
    std::span<const double> u) const {
  if (static_cast<long long>(u.size()) != spec_.p) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: vector has ", u.size(), " entries, projection "
        "expects ", spec_.p));
  }
  std::vector<double> x(spec_.k, 0.0);
  if (spec_.is_dense()) {
    Eigen::Map<const Eigen::VectorXd> uv(u.data(), spec_.p);
    Eigen::Map<Eigen::VectorXd> xv(x.data(), spec_.k);
    xv.noalias() = w_.transpose() * uv;
    xv /= std::sqrt(static_cast<double>(spec_.k));
    return x;
  }
  const long long width = bin_width();
  for (long long i = 0; i < spec_.p; ++i) {
    const int pos = position_[i];
    x[pos / width] += oporp_w_[pos] * u[i];
  }
  return x;
}

absl::StatusOr<Sketch> ProjectVector(const ProjectionOperator& op,
                                     const DataVector& u) {
  auto x = op.Project(u.values());
  if (!x.ok()) return x.status();
  Sketch sk;
  sk.payload = Sketch::Payload::kReal;
  sk.values = *std::move(x);
  sk.provenance.spec_digest = op.spec().Digest();
  sk.provenance.projection_kind = ProjectionTag(op.spec());
  return sk;
}

absl::StatusOr<Sketch> TakeSigns(const Sketch& real) {
  if (real.is_sign()) {
    return absl::InvalidArgumentError("sketch already has a sign payload");
  }
  Sketch out;
  out.payload = Sketch::Payload::kSign;
  out.provenance = real.provenance;
  out.provenance.zero_indices.clear();
  out.signs.resize(real.values.size());
  for (size_t j = 0; j < real.values.size(); ++j) {
    out.signs[j] = SignOf(real.values[j]);
    if (real.values[j] == 0) {
      out.provenance.zero_indices.push_back(static_cast<int>(j));
    }
  }
  return out;
}

}  // namespace dprp
