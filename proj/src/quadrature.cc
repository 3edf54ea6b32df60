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

#include "dprp/quadrature.h"

#include <array>
#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"

namespace dprp {
namespace {

constexpr int kOrder = 20;

struct Rule {
  std::array<double, kOrder> nodes;
  std::array<double, kOrder> weights;
};

// Legendre nodes on [-1, 1] by Newton iteration from the Chebyshev guesses.
Rule MakeRule() {
  Rule rule;
  for (int i = 0; i < kOrder; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (kOrder + 0.5));
    double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int n = 2; n <= kOrder; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / n;
        p0 = p1;
        p1 = p2;
      }
      dp = kOrder * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const Rule& GetRule() {
  static const Rule rule = MakeRule();
  return rule;
}

double Panel(const std::function<double(double)>& f, double a, double b,
             int* evaluations) {
  const Rule& rule = GetRule();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0;
  for (int i = 0; i < kOrder; ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  *evaluations += kOrder;
  return sum * half;
}

struct Adaptive {
  const std::function<double(double)>& f;
  double density;  // tolerance per unit length
  int max_depth;
  QuadratureResult result;
  bool failed = false;

  void Run(double a, double b, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double left = Panel(f, a, m, &result.evaluations);
    const double right = Panel(f, m, b, &result.evaluations);
    const double diff = std::abs(left + right - whole);
    if (diff <= density * (b - a) || !std::isfinite(diff)) {
      if (!std::isfinite(diff)) failed = true;
      result.value += left + right;
      result.error_estimate += diff;
      return;
    }
    if (depth >= max_depth) {
      failed = true;
      result.value += left + right;
      result.error_estimate += diff;
      return;
    }
    Run(a, m, left, depth + 1);
    Run(m, b, right, depth + 1);
  }
};

}  // namespace

absl::StatusOr<QuadratureResult> IntegrateAdaptive(
    const std::function<double(double)>& f, double a, double b,
    const QuadratureOptions& options) {
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) {
    return absl::InvalidArgumentError("integration interval must be finite");
  }
  Adaptive run{f, options.tolerance / (b - a), options.max_depth, {}};
  const int panels = std::max(1, options.initial_panels);
  const double h = (b - a) / panels;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == panels ? b : lo + h;
    run.Run(lo, hi, Panel(f, lo, hi, &run.result.evaluations), 0);
  }
  if (run.failed || run.result.error_estimate > options.tolerance) {
    return absl::InternalError(absl::StrCat(
        "quadrature did not converge: error estimate ",
        run.result.error_estimate, " exceeds tolerance ", options.tolerance));
  }
  return run.result;
}

}  // namespace dprp
