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

#include "dprp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "dprp/normal.h"

namespace dprp {
namespace {

constexpr int kMaxBisections = 200;
constexpr double kResidualTolerance = 1e-12;

absl::Status CheckPositive(double x, const char* name) {
  if (!(x > 0) || !std::isfinite(x)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", x));
  }
  return absl::OkStatus();
}

absl::Status CheckShare(double d) {
  if (!(d > 0 && d < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta share must lie in (0, 1), got ", d));
  }
  return absl::OkStatus();
}

}  // namespace

std::string SensitivityBasisName(SensitivityBasis basis) {
  switch (basis) {
    case SensitivityBasis::kExactFromMatrix:
      return "exact-from-matrix";
    case SensitivityBasis::kClosedForm:
      return "closed-form";
    case SensitivityBasis::kHighProbabilityBound:
      return "high-probability-bound";
  }
  return "unknown";
}

absl::StatusOr<Sensitivity> SensitivityFromMatrix(const Eigen::MatrixXd& w,
                                                  double beta) {
  if (w.size() == 0) return absl::InvalidArgumentError("empty matrix");
  if (auto s = CheckPositive(beta, "beta"); !s.ok()) return s;
  double max_l1 = 0, max_l2sq = 0;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    max_l1 = std::max(max_l1, w.row(i).lpNorm<1>());
    max_l2sq = std::max(max_l2sq, w.row(i).squaredNorm());
  }
  const double root_k = std::sqrt(static_cast<double>(w.cols()));
  Sensitivity s;
  // The ratio is formed first so that a row norm of exactly sqrt(k) yields
  // exactly beta.
  s.l2 = beta * (std::sqrt(max_l2sq) / root_k);
  s.l1 = beta * (max_l1 / root_k);
  s.basis = SensitivityBasis::kExactFromMatrix;
  return s;
}

absl::StatusOr<double> SensitivityL2Bound(long long p, int k, double beta,
                                          double delta_share) {
  if (p < 1 || k < 1) return absl::InvalidArgumentError("p, k must be >= 1");
  if (auto s = CheckPositive(beta, "beta"); !s.ok()) return s;
  if (auto s = CheckShare(delta_share); !s.ok()) return s;
  const double a = std::log(static_cast<double>(p) / delta_share) / k;
  return beta * std::sqrt(1.0 + 2.0 * std::sqrt(a) + 2.0 * a);
}

absl::StatusOr<double> SensitivityL1Bound(long long p, int k, double beta,
                                          double delta_share) {
  if (p < 1 || k < 1) return absl::InvalidArgumentError("p, k must be >= 1");
  if (auto s = CheckPositive(beta, "beta"); !s.ok()) return s;
  if (auto s = CheckShare(delta_share); !s.ok()) return s;
  return beta * std::sqrt(2.0 * k * std::numbers::ln2 +
                          2.0 * std::log(static_cast<double>(p) / delta_share));
}

absl::StatusOr<double> ClassicGaussianSigma(double delta2, double eps,
                                            double delta) {
  if (auto s = CheckPositive(delta2, "delta2"); !s.ok()) return s;
  if (auto s = CheckPositive(eps, "epsilon"); !s.ok()) return s;
  if (!(delta > 0 && delta < 0.5)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "delta out of range for classic mechanism: need 0 < delta < 1/2, got ",
        delta));
  }
  return delta2 * std::sqrt(2.0 * (std::log(1.0 / delta) + eps)) / eps;
}

double GaussianPrivacyProfile(double sigma, double delta2, double eps) {
  const double a = delta2 / (2.0 * sigma);
  const double b = eps * sigma / delta2;
  return NormalCdf(a - b) - std::exp(eps + NormalLogCdf(-a - b));
}

absl::StatusOr<double> OptimalGaussianSigma(double delta2, double eps,
                                            double delta) {
  if (auto s = CheckPositive(delta2, "delta2"); !s.ok()) return s;
  if (auto s = CheckPositive(eps, "epsilon"); !s.ok()) return s;
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  // Work in units of delta2; the profile depends on sigma / delta2 only.
  auto f = [&](double s) { return GaussianPrivacyProfile(s, 1.0, eps) - delta; };
  double lo = 1e-6;
  for (int i = 0; i < kMaxBisections && f(lo) <= 0; ++i) lo *= 0.5;
  double hi = std::sqrt(2.0 * (std::log(1.0 / delta) + eps)) / eps + 1.0;
  for (int i = 0; i < kMaxBisections && f(hi) > 0; ++i) hi *= 2.0;
  if (!(f(lo) > 0) || !(f(hi) <= 0)) {
    return absl::InternalError(absl::StrCat(
        "optimal Gaussian calibration: could not bracket the root for eps=",
        eps, " delta=", delta));
  }
  for (int i = 0; i < kMaxBisections; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double residual = std::abs(f(hi));
  if (!(residual < kResidualTolerance)) {
    return absl::InternalError(absl::StrCat(
        "optimal Gaussian calibration did not converge: residual ", residual,
        " for eps=", eps, " delta=", delta));
  }
  return hi * delta2;
}

absl::StatusOr<double> AnalyticRpGaussianSigma(long long p, int k, double beta,
                                               double eps, double delta) {
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  auto bound = SensitivityL2Bound(p, k, beta, delta / 2);
  if (!bound.ok()) return bound.status();
  return ClassicGaussianSigma(*bound, eps, delta / 2);
}

absl::StatusOr<double> LaplaceLambda(double delta1, double eps) {
  if (auto s = CheckPositive(delta1, "delta1"); !s.ok()) return s;
  if (auto s = CheckPositive(eps, "epsilon"); !s.ok()) return s;
  return delta1 / eps;
}

EpsDelta Compose(std::span<const EpsDelta> budgets) {
  EpsDelta total;
  for (const auto& b : budgets) {
    total.epsilon += b.epsilon;
    total.delta += b.delta;
  }
  return total;
}

}  // namespace dprp
