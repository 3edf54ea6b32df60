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

#include "dprp/core.h"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "absl/strings/str_cat.h"

namespace dprp {

absl::StatusOr<DataVector> DataVector::Create(std::vector<double> values,
                                              double bound) {
  if (!(bound > 0) || !std::isfinite(bound)) {
    return absl::InvalidArgumentError(
        absl::StrCat("bound must be positive, got ", bound));
  }
  if (values.empty()) {
    return absl::InvalidArgumentError("data vector must be nonempty");
  }
  double sq = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double v = values[i];
    if (!std::isfinite(v) || std::abs(v) > bound) {
      return absl::InvalidArgumentError(absl::StrCat(
          "entry ", i, " = ", v, " out of bound [-", bound, ", ", bound, "]"));
    }
    sq += v * v;
  }
  if (sq == 0) {
    return absl::InvalidArgumentError("data vector has zero norm");
  }
  return DataVector(std::move(values), bound);
}

double DataVector::Norm() const {
  double sq = 0;
  for (double v : values_) sq += v * v;
  return std::sqrt(sq);
}

std::string Dataset::RowId(size_t i) const {
  if (i < ids.size()) return ids[i];
  return std::to_string(i);
}

absl::StatusOr<DataVector> Dataset::Row(size_t i) const {
  if (i >= rows.size()) {
    return absl::OutOfRangeError(absl::StrCat("row ", i, " out of range"));
  }
  auto v = DataVector::Create(rows[i], bound);
  if (!v.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("row ", RowId(i), ": ", v.status().message()));
  }
  return v;
}

absl::Status ValidationReport::ToStatus() const {
  if (ok()) return absl::OkStatus();
  const Violation& v = violations.front();
  return absl::InvalidArgumentError(
      absl::StrCat(v.message, violations.size() > 1
                                  ? absl::StrCat(" (and ", violations.size() - 1,
                                                 " more)")
                                  : ""));
}

ValidationReport ValidateDataset(const Dataset& d) {
  ValidationReport report;
  if (d.rows.empty()) {
    report.violations.push_back(
        {0, ViolationKind::kEmpty, 0, "dataset has no rows"});
    return report;
  }
  const size_t p = d.dim();
  for (size_t r = 0; r < d.rows.size(); ++r) {
    const auto& row = d.rows[r];
    if (row.size() != p || p == 0) {
      report.violations.push_back(
          {r, ViolationKind::kDimensionMismatch, 0,
           absl::StrCat("row ", d.RowId(r), ": dimension mismatch (", row.size(),
                        " vs ", p, ")")});
      continue;
    }
    double sq = 0;
    for (size_t c = 0; c < row.size(); ++c) {
      const double v = row[c];
      if (!std::isfinite(v) || std::abs(v) > d.bound) {
        report.violations.push_back(
            {r, ViolationKind::kOutOfBound, c,
             absl::StrCat("row ", d.RowId(r), " column ", c,
                          ": out of bound (", v, ", C=", d.bound, ")")});
      }
      sq += v * v;
    }
    if (sq == 0) {
      report.violations.push_back({r, ViolationKind::kZeroNorm, 0,
                                   absl::StrCat("row ", d.RowId(r),
                                                ": zero-norm row")});
    }
  }
  return report;
}

Dataset MaxNormalize(const Dataset& d) {
  Dataset out = d;
  out.bound = 1.0;
  if (d.rows.empty()) return out;
  size_t p = 0;
  for (const auto& row : d.rows) p = std::max(p, row.size());
  std::vector<double> col_max(p, 0.0);
  for (const auto& row : d.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      col_max[c] = std::max(col_max[c], std::abs(row[c]));
    }
  }
  for (auto& row : out.rows) {
    for (size_t c = 0; c < row.size(); ++c) {
      if (col_max[c] > 0) row[c] /= col_max[c];
    }
  }
  return out;
}

absl::Status PrivacyBudget::Validate(bool pure) const {
  if (!(epsilon > 0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta >= 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1), got ", delta));
  }
  if (!(beta > 0) || !std::isfinite(beta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("beta must be positive, got ", beta));
  }
  if (repetitions < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("repetitions must be >= 1, got ", repetitions));
  }
  if (pure && delta != 0) {
    return absl::InvalidArgumentError(
        "this mechanism is pure epsilon-DP and requires delta = 0");
  }
  return absl::OkStatus();
}

uint64_t Fnv1a64(std::span<const unsigned char> bytes, uint64_t seed) {
  uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string HexDigest(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string DigestOf(std::span<const double> values) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
  return HexDigest(Fnv1a64({bytes, values.size() * sizeof(double)}));
}

std::string DigestOfString(std::string_view s) {
  const auto* bytes = reinterpret_cast<const unsigned char*>(s.data());
  return HexDigest(Fnv1a64({bytes, s.size()}));
}

}  // namespace dprp
