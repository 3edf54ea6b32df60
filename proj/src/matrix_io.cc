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

#include "dprp/matrix_io.h"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/strings/ascii.h"

namespace dprp {
namespace {

static_assert(std::endian::native == std::endian::little,
              "binary formats assume a little-endian host");

void PutU32(std::ostream& out, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

bool GetU32(std::istream& in, uint32_t* v) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) return false;
  *v = b[0] | (b[1] << 8) | (b[2] << 16) | (static_cast<uint32_t>(b[3]) << 24);
  return true;
}

bool ParseDouble(absl::string_view field, double* out) {
  field = absl::StripAsciiWhitespace(field);
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, *out);
  return ec == std::errc() && ptr == end;
}

absl::Status CheckRectangular(const std::vector<std::vector<double>>& rows) {
  for (const auto& r : rows) {
    if (r.size() != rows.front().size()) {
      return absl::InvalidArgumentError("matrix rows have unequal lengths");
    }
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<Dataset> ParseCsv(std::istream& in, double bound) {
  Dataset d;
  d.bound = bound;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    absl::string_view view = absl::StripAsciiWhitespace(line);
    if (view.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (absl::string_view field : absl::StrSplit(view, ',')) {
      double v;
      if (!ParseDouble(field, &v)) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (d.rows.empty() && line_no == 1) continue;  // header
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": non-numeric field"));
    }
    d.rows.push_back(std::move(row));
  }
  return d;
}

absl::StatusOr<Dataset> ReadCsv(const std::string& path, double bound) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseCsv(in, bound);
}

absl::Status WriteCsv(const std::string& path,
                      const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  char buf[32];
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), row[i]);
      if (i) out << ',';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
  return out ? absl::OkStatus()
             : absl::InternalError(absl::StrCat("write failed: ", path));
}

absl::Status WriteMatrix(std::ostream& out,
                         const std::vector<std::vector<double>>& rows,
                         StoredPrecision precision) {
  if (auto s = CheckRectangular(rows); !s.ok()) return s;
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  if (rows.size() > UINT32_MAX || cols > UINT32_MAX) {
    return absl::InvalidArgumentError("matrix too large for u32 header");
  }
  out.write(kMatrixMagic, 8);
  PutU32(out, static_cast<uint32_t>(rows.size()));
  PutU32(out, static_cast<uint32_t>(cols));
  for (const auto& row : rows) {
    for (double v : row) {
      if (precision == StoredPrecision::kFloat32) {
        v = static_cast<double>(static_cast<float>(v));
      }
      out.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  }
  return out ? absl::OkStatus() : absl::InternalError("matrix write failed");
}

absl::StatusOr<std::vector<std::vector<double>>> ReadMatrix(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kMatrixMagic, 8) != 0) {
    return absl::InvalidArgumentError("bad matrix magic");
  }
  uint32_t rows, cols;
  if (!GetU32(in, &rows) || !GetU32(in, &cols)) {
    return absl::InvalidArgumentError("truncated matrix header");
  }
  std::vector<std::vector<double>> m(rows, std::vector<double>(cols));
  for (auto& row : m) {
    if (cols == 0) continue;
    if (!in.read(reinterpret_cast<char*>(row.data()), cols * sizeof(double))) {
      return absl::InvalidArgumentError("truncated matrix body");
    }
  }
  return m;
}

absl::Status WriteMatrixFile(const std::string& path,
                             const std::vector<std::vector<double>>& rows,
                             StoredPrecision precision) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  return WriteMatrix(out, rows, precision);
}

absl::StatusOr<std::vector<std::vector<double>>> ReadMatrixFile(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadMatrix(in);
}

absl::StatusOr<Dataset> ReadDataset(const std::string& path, double bound) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  char magic[8] = {};
  in.read(magic, 8);
  const bool binary = in.gcount() == 8 && std::memcmp(magic, kMatrixMagic, 8) == 0;
  in.clear();
  in.seekg(0);
  if (!binary) return ParseCsv(in, bound);
  auto m = ReadMatrix(in);
  if (!m.ok()) return m.status();
  Dataset d;
  d.rows = *std::move(m);
  d.bound = bound;
  return d;
}

std::vector<uint8_t> PackSigns(const std::vector<int8_t>& signs) {
  std::vector<uint8_t> bytes((signs.size() + 7) / 8, 0);
  for (size_t j = 0; j < signs.size(); ++j) {
    if (signs[j] > 0) bytes[j / 8] |= static_cast<uint8_t>(1u << (j % 8));
  }
  return bytes;
}

std::vector<int8_t> UnpackSigns(const std::vector<uint8_t>& bytes,
                                size_t bits) {
  std::vector<int8_t> signs(bits);
  for (size_t j = 0; j < bits; ++j) {
    signs[j] = (bytes[j / 8] >> (j % 8)) & 1 ? 1 : -1;
  }
  return signs;
}

absl::Status WriteSigns(std::ostream& out,
                        const std::vector<std::vector<int8_t>>& rows) {
  const size_t bits = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != bits) {
      return absl::InvalidArgumentError("sign rows have unequal lengths");
    }
  }
  out.write(kSignMagic, 8);
  PutU32(out, static_cast<uint32_t>(rows.size()));
  PutU32(out, static_cast<uint32_t>(bits));
  for (const auto& r : rows) {
    const auto bytes = PackSigns(r);
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  }
  return out ? absl::OkStatus() : absl::InternalError("sign write failed");
}

absl::StatusOr<std::vector<std::vector<int8_t>>> ReadSigns(std::istream& in) {
  char magic[8];
  if (!in.read(magic, 8) || std::memcmp(magic, kSignMagic, 8) != 0) {
    return absl::InvalidArgumentError("bad sign-file magic");
  }
  uint32_t rows, bits;
  if (!GetU32(in, &rows) || !GetU32(in, &bits)) {
    return absl::InvalidArgumentError("truncated sign header");
  }
  std::vector<std::vector<int8_t>> out;
  out.reserve(rows);
  std::vector<uint8_t> bytes((bits + 7) / 8);
  for (uint32_t r = 0; r < rows; ++r) {
    if (!bytes.empty() &&
        !in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
      return absl::InvalidArgumentError("truncated sign body");
    }
    out.push_back(UnpackSigns(bytes, bits));
  }
  return out;
}

absl::Status WriteSignsFile(const std::string& path,
                            const std::vector<std::vector<int8_t>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) return absl::InternalError(absl::StrCat("cannot write ", path));
  return WriteSigns(out, rows);
}

absl::StatusOr<std::vector<std::vector<int8_t>>> ReadSignsFile(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadSigns(in);
}

}  // namespace dprp
