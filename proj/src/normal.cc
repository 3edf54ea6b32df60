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

#include "dprp/normal.h"

#include <cmath>
#include <numbers>

namespace dprp {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
// log(sqrt(2 pi))
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

}  // namespace

double NormalPdf(double x) {
  return std::exp(-0.5 * x * x - kLogSqrt2Pi);
}

double NormalCdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double NormalLogCdf(double x) {
  if (x > -30.0) {
    if (x > 5.0) return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
    return std::log(NormalCdf(x));
  }
  // Phi(x) = phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
  const double inv2 = 1.0 / (x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 12; ++n) {
    term *= -(2.0 * n - 1.0) * inv2;
    sum += term;
  }
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(sum);
}

double HalfNormalCdf(double x) { return std::erf(x * kInvSqrt2); }

}  // namespace dprp
