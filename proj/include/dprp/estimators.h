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

// Similarity estimates from sketches, each paired with its theoretical
// variance where a closed form exists.

#ifndef DPRP_ESTIMATORS_H_
#define DPRP_ESTIMATORS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "dprp/projections.h"

namespace dprp {

struct EstimateReport {
  double estimate = 0;
  // Absent when no closed form applies.
  std::optional<double> variance;
  std::string estimator;
  // Digest of the inputs (sketch payloads and provenance).
  std::string inputs_digest;
  // Set when an angle estimate falls outside [0, pi].
  bool out_of_range = false;
};

// Original vectors, when known, make the attached variance exact instead of
// a plug-in.
struct InnerProductTruth {
  std::span<const double> u;
  std::span<const double> v;
};

// sum_j x_j y_j. Both sketches must come from the same projection. The
// variance uses the recorded noise scale; without `truth` it is a plug-in
// from the sketches with sum_i u_i^2 v_i^2 taken as 0.
absl::StatusOr<EstimateReport> InnerProduct(
    const Sketch& x, const Sketch& y,
    const std::optional<InnerProductTruth>& truth = std::nullopt);

// x^T y / (||x|| ||y||). No variance is attached.
absl::StatusOr<EstimateReport> CosineNormalized(const Sketch& x,
                                                const Sketch& y);

// pi (1 - collisions / k) with plug-in variance theta (pi - theta) / k.
absl::StatusOr<EstimateReport> AngleFromSigns(const Sketch& a,
                                              const Sketch& b);

// Debiased angle from two sketches perturbed by randomized response with the
// same eps'. Not clamped to [0, pi]. Refuses sketches with per-bit budgets.
absl::StatusOr<EstimateReport> AngleFromRrSigns(const Sketch& a,
                                                const Sketch& b,
                                                double eps_prime);

// Collision fraction after randomized response with eps' on both sides:
// P (e-1)^2/(e+1)^2 + 2e/(e+1)^2 with e = exp(eps').
double RrCollisionForward(double collision, double eps_prime);
// Inverse of RrCollisionForward.
double RrCollisionDebias(double noisy_collision, double eps_prime);

// Number of positions where the signs differ.
int HammingDistance(std::span<const int8_t> a, std::span<const int8_t> b);

// Sign vectors packed 64 per word (bit set means +1) for fast Hamming
// distances.
std::vector<uint64_t> PackWords(std::span<const int8_t> signs);
int HammingDistancePacked(std::span<const uint64_t> a,
                          std::span<const uint64_t> b);

}  // namespace dprp

#endif  // DPRP_ESTIMATORS_H_
