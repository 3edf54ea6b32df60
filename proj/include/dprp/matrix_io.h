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

// File formats.
//
// Binary matrix ("DPRPMAT1"): 8-byte magic, u32 rows, u32 cols (both
// little-endian), then rows*cols little-endian IEEE-754 binary64 values in
// row-major order.
//
// Packed signs ("DPRPSGN1"): 8-byte magic, u32 rows, u32 bits per row, then
// for every row ceil(bits/8) bytes. Bit j of a row lives in byte j/8 at
// position j%8 (least significant first); a set bit means +1.

#ifndef DPRP_MATRIX_IO_H_
#define DPRP_MATRIX_IO_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dprp/core.h"

namespace dprp {

inline constexpr char kMatrixMagic[8] = {'D', 'P', 'R', 'P',
                                         'M', 'A', 'T', '1'};
inline constexpr char kSignMagic[8] = {'D', 'P', 'R', 'P', 'S', 'G', 'N', '1'};

enum class StoredPrecision {
  kFloat64,
  // Values are rounded through binary32 before being written. Lossy.
  kFloat32,
};

// Reads one row per line. A first line containing any non-numeric field is
// treated as a header and skipped. Rows may be ragged; validation is left to
// ValidateDataset().
absl::StatusOr<Dataset> ParseCsv(std::istream& in, double bound = 1.0);
absl::StatusOr<Dataset> ReadCsv(const std::string& path, double bound = 1.0);
absl::Status WriteCsv(const std::string& path,
                      const std::vector<std::vector<double>>& rows);

absl::Status WriteMatrix(std::ostream& out,
                         const std::vector<std::vector<double>>& rows,
                         StoredPrecision precision = StoredPrecision::kFloat64);
absl::StatusOr<std::vector<std::vector<double>>> ReadMatrix(std::istream& in);

absl::Status WriteMatrixFile(
    const std::string& path, const std::vector<std::vector<double>>& rows,
    StoredPrecision precision = StoredPrecision::kFloat64);
absl::StatusOr<std::vector<std::vector<double>>> ReadMatrixFile(
    const std::string& path);

// Loads a dataset from either format, chosen by sniffing the magic bytes.
absl::StatusOr<Dataset> ReadDataset(const std::string& path,
                                    double bound = 1.0);

// Sign rows hold only -1/+1 entries.
std::vector<uint8_t> PackSigns(const std::vector<int8_t>& signs);
std::vector<int8_t> UnpackSigns(const std::vector<uint8_t>& bytes,
                                size_t bits);

absl::Status WriteSigns(std::ostream& out,
                        const std::vector<std::vector<int8_t>>& rows);
absl::StatusOr<std::vector<std::vector<int8_t>>> ReadSigns(std::istream& in);

absl::Status WriteSignsFile(const std::string& path,
                            const std::vector<std::vector<int8_t>>& rows);
absl::StatusOr<std::vector<std::vector<int8_t>>> ReadSignsFile(
    const std::string& path);

}  // namespace dprp

#endif  // DPRP_MATRIX_IO_H_
