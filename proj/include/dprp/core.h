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

#ifndef DPRP_CORE_H_
#define DPRP_CORE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace dprp {

// A dense data vector with every entry in [-C, C] and a nonzero l2 norm.
// Instances can only be obtained through Create(), so holding a DataVector
// means the invariants hold.
class DataVector {
 public:
  static absl::StatusOr<DataVector> Create(std::vector<double> values,
                                           double bound = 1.0);

  std::span<const double> values() const { return values_; }
  size_t size() const { return values_.size(); }
  double bound() const { return bound_; }
  double operator[](size_t i) const { return values_[i]; }
  double Norm() const;

 private:
  DataVector(std::vector<double> values, double bound)
      : values_(std::move(values)), bound_(bound) {}

  std::vector<double> values_;
  double bound_;
};

// Row-oriented dense dataset. Rows are stored unvalidated so that ingestion
// can report every problem at once; see ValidateDataset().
struct Dataset {
  std::vector<std::vector<double>> rows;
  double bound = 1.0;
  // Optional; empty means rows are identified by index.
  std::vector<std::string> ids;

  size_t size() const { return rows.size(); }
  bool empty() const { return rows.empty(); }
  // Dimension of the first row, or 0 for an empty dataset.
  size_t dim() const { return rows.empty() ? 0 : rows.front().size(); }
  std::string RowId(size_t i) const;

  // Validated copy of row i.
  absl::StatusOr<DataVector> Row(size_t i) const;
};

enum class ViolationKind { kOutOfBound, kZeroNorm, kDimensionMismatch, kEmpty };

struct Violation {
  size_t row = 0;
  ViolationKind kind = ViolationKind::kOutOfBound;
  // Offending column for kOutOfBound, otherwise 0.
  size_t column = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  // First violation as a status, or OK.
  absl::Status ToStatus() const;
};

ValidationReport ValidateDataset(const Dataset& d);

// Divides every column by its largest absolute value. All-zero columns are
// left untouched. The result has bound 1.
Dataset MaxNormalize(const Dataset& d);

// Privacy parameters shared by every mechanism. beta is the adjacency bound:
// neighbours differ in a single coordinate by at most beta.
struct PrivacyBudget {
  double epsilon = 1.0;
  double delta = 0.0;
  double beta = 1.0;
  int repetitions = 1;

  // `pure` additionally requires delta == 0.
  absl::Status Validate(bool pure = false) const;
};

// FNV-1a over raw bytes, rendered as 16 hex digits. Used for spec digests and
// manifest content hashes.
uint64_t Fnv1a64(std::span<const unsigned char> bytes, uint64_t seed = 0);
std::string HexDigest(uint64_t h);
std::string DigestOf(std::span<const double> values);
std::string DigestOfString(std::string_view s);

}  // namespace dprp

#endif  // DPRP_CORE_H_
