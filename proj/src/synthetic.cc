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

#include "dprp/synthetic.h"

#include <cmath>

#include "absl/strings/str_cat.h"

namespace dprp {
namespace {

std::vector<double> UnitGaussian(int p, RngStream& rng) {
  std::vector<double> v(p);
  double sq = 0;
  do {
    sq = 0;
    for (auto& x : v) {
      x = rng.Gaussian();
      sq += x * x;
    }
  } while (sq == 0);
  const double inv = 1.0 / std::sqrt(sq);
  for (auto& x : v) x *= inv;
  return v;
}

void Rescale(std::vector<double>& v, double norm) {
  double sq = 0;
  for (double x : v) sq += x * x;
  const double f = norm / std::sqrt(sq);
  for (auto& x : v) x *= f;
}

}  // namespace

Dataset SphereDataset(int n, int p, double norm, RngStream& rng) {
  Dataset d;
  d.bound = norm;
  d.rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    auto v = UnitGaussian(p, rng);
    for (auto& x : v) x *= norm;
    d.rows.push_back(std::move(v));
  }
  return d;
}

absl::Status SyntheticSpec::Validate() const {
  if (n_database < 1 || n_queries < 1) {
    return absl::InvalidArgumentError("dataset sizes must be >= 1");
  }
  if (p < 1) return absl::InvalidArgumentError("p must be >= 1");
  if (!(norm > 0) || !std::isfinite(norm)) {
    return absl::InvalidArgumentError(absl::StrCat("norm must be positive, got ",
                                                   norm));
  }
  if (clusters < 0) return absl::InvalidArgumentError("clusters must be >= 0");
  if (!(spread >= 0)) return absl::InvalidArgumentError("spread must be >= 0");
  return absl::OkStatus();
}

absl::StatusOr<SyntheticData> MakeSyntheticData(const SyntheticSpec& spec) {
  if (auto s = spec.Validate(); !s.ok()) return s;
  RngStream rng(spec.seed, kDataStream);
  SyntheticData out;
  if (spec.clusters == 0) {
    out.database = SphereDataset(spec.n_database, spec.p, spec.norm, rng);
    out.queries = SphereDataset(spec.n_queries, spec.p, spec.norm, rng);
    out.database_labels.assign(spec.n_database, 0);
    out.query_labels.assign(spec.n_queries, 0);
    return out;
  }
  std::vector<std::vector<double>> centres;
  for (int c = 0; c < spec.clusters; ++c) {
    centres.push_back(UnitGaussian(spec.p, rng));
  }
  auto draw = [&](int n, Dataset& d, std::vector<int>& labels) {
    d.bound = spec.norm;
    for (int i = 0; i < n; ++i) {
      const int c = static_cast<int>(rng.Below(spec.clusters));
      auto noise = UnitGaussian(spec.p, rng);
      std::vector<double> v(spec.p);
      for (int j = 0; j < spec.p; ++j) {
        v[j] = centres[c][j] + spec.spread * noise[j];
      }
      Rescale(v, spec.norm);
      d.rows.push_back(std::move(v));
      labels.push_back(c);
    }
  };
  draw(spec.n_database, out.database, out.database_labels);
  draw(spec.n_queries, out.queries, out.query_labels);
  return out;
}

}  // namespace dprp
