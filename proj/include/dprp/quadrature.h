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

#ifndef DPRP_QUADRATURE_H_
#define DPRP_QUADRATURE_H_

#include <functional>

#include "absl/status/statusor.h"

namespace dprp {

struct QuadratureOptions {
  // Absolute tolerance on the whole integral.
  double tolerance = 1e-8;
  // Initial number of equal panels.
  int initial_panels = 16;
  // Maximum bisection depth of any panel.
  int max_depth = 40;
};

struct QuadratureResult {
  double value = 0;
  // Sum over accepted panels of |coarse - refined|.
  double error_estimate = 0;
  int evaluations = 0;
};

// Adaptive composite Gauss-Legendre on [a, b]. Each panel is integrated with
// a 20-point rule and compared against the sum over its two halves; panels
// whose discrepancy exceeds their share of the tolerance are bisected.
// Returns an error if the tolerance cannot be met within max_depth.
absl::StatusOr<QuadratureResult> IntegrateAdaptive(
    const std::function<double(double)>& f, double a, double b,
    const QuadratureOptions& options = {});

}  // namespace dprp

#endif  // DPRP_QUADRATURE_H_
