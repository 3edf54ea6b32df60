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

// Synthetic datasets for the retrieval benchmark and the oracles.

#ifndef DPRP_SYNTHETIC_H_
#define DPRP_SYNTHETIC_H_

#include <cstdint>
#include <vector>

#include "absl/status/statusor.h"
#include "dprp/core.h"
#include "dprp/rng.h"

namespace dprp {

// n rows drawn uniformly from the sphere of radius `norm` in R^p. The bound
// of the returned dataset is `norm`.
Dataset SphereDataset(int n, int p, double norm, RngStream& rng);

struct SyntheticSpec {
  int n_database = 2000;
  int n_queries = 200;
  int p = 1024;
  // Every row is rescaled to this norm.
  double norm = 10.0;
  // Rows are noisy copies of `clusters` random centres. 0 draws every row
  // uniformly from the sphere instead.
  int clusters = 20;
  // Norm of the perturbation added to a unit centre before rescaling.
  double spread = 1.0;
  uint64_t seed = 1;

  absl::Status Validate() const;
};

struct SyntheticData {
  Dataset database;
  Dataset queries;
  // Cluster of each row; all zero when clusters == 0.
  std::vector<int> database_labels;
  std::vector<int> query_labels;
};

absl::StatusOr<SyntheticData> MakeSyntheticData(const SyntheticSpec& spec);

}  // namespace dprp

#endif  // DPRP_SYNTHETIC_H_
