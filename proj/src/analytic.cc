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

#include "dprp/analytic.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "dprp/normal.h"
#include "dprp/quadrature.h"

namespace dprp {
namespace {

constexpr double kPi = std::numbers::pi;

absl::Status CheckPositive(double x, const char* name) {
  if (!(x > 0) || !std::isfinite(x)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", x));
  }
  return absl::OkStatus();
}

absl::Status CheckCorrelation(double rho) {
  if (!(std::abs(rho) < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("rho must lie in (-1, 1), got ", rho));
  }
  return absl::OkStatus();
}

absl::Status CheckAngle(double theta) {
  if (!(theta >= 0 && theta <= kPi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("theta must lie in [0, pi], got ", theta));
  }
  return absl::OkStatus();
}

// atan((r - rho)/s) + atan((r + rho)/s) with s = sqrt(1 - rho^2).
double AtanSum(double r, double rho) {
  const double s = std::sqrt(1.0 - rho * rho);
  return std::atan((r - rho) / s) + std::atan((r + rho) / s);
}

}  // namespace

absl::StatusOr<TailBoundResult> ChiSquareTail(int n, double t) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (auto s = CheckPositive(t, "t"); !s.ok()) return s;
  return TailBoundResult{n + 2.0 * std::sqrt(n * t) + 2.0 * t, std::exp(-t)};
}

absl::StatusOr<TailBoundResult> HalfNormalTail(int n, double t) {
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (auto s = CheckPositive(t, "t"); !s.ok()) return s;
  const double nd = n;
  return TailBoundResult{
      std::sqrt(2.0 * nd * nd * std::numbers::ln2 + 2.0 * nd * t),
      std::exp(-t)};
}

absl::StatusOr<TailBoundResult> BinomialTail(int n, double p, double eta) {
  if (n < 0) return absl::InvalidArgumentError("n must be >= 0");
  if (!(p >= 0 && p <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("p must lie in [0, 1], got ", p));
  }
  if (!(eta >= 0) || !std::isfinite(eta)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta must be nonnegative, got ", eta));
  }
  const double mu = n * p;
  return TailBoundResult{(1.0 + eta) * mu,
                         std::exp(-eta * eta * mu / (eta + 2.0))};
}

absl::StatusOr<double> AbsExceedProb(double r, double rho) {
  if (auto s = CheckPositive(r, "r"); !s.ok()) return s;
  if (auto s = CheckCorrelation(rho); !s.ok()) return s;
  return AtanSum(r, rho) / kPi;
}

absl::StatusOr<double> ConditionalAbsExpectation(double r, double rho,
                                                 double sigma_x) {
  if (auto s = CheckPositive(r, "r"); !s.ok()) return s;
  if (auto s = CheckCorrelation(rho); !s.ok()) return s;
  if (auto s = CheckPositive(sigma_x, "sigma_x"); !s.ok()) return s;
  const double num = (r - rho) / std::sqrt(1.0 + r * r - 2.0 * r * rho) +
                     (r + rho) / std::sqrt(1.0 + r * r + 2.0 * r * rho);
  return sigma_x * std::sqrt(kPi / 2.0) * num / AtanSum(r, rho);
}

absl::StatusOr<double> ConditionalTailBound(double t, double sigma_x) {
  if (!(t >= 0) || !std::isfinite(t)) {
    return absl::InvalidArgumentError(
        absl::StrCat("t must be nonnegative, got ", t));
  }
  if (auto s = CheckPositive(sigma_x, "sigma_x"); !s.ok()) return s;
  return std::exp(-t * t / (2.0 * sigma_x * sigma_x));
}

absl::StatusOr<double> PPlusGaussian(double r, long long p) {
  if (auto s = CheckPositive(r, "r"); !s.ok()) return s;
  if (r > 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("r must lie in (0, 1], got ", r));
  }
  if (p < 1) return absl::InvalidArgumentError("p must be >= 1");
  const double pm1 = static_cast<double>(p - 1);
  auto integrand = [&](double t) {
    const double tail = std::erfc(t * (1.0 / std::numbers::sqrt2));
    // [2 Phi(t) - 1]^{p-1} = exp((p-1) log1p(-erfc(t/sqrt2))).
    const double power = p == 1 ? 1.0 : std::exp(pm1 * std::log1p(-tail));
    return 2.0 * static_cast<double>(p) * power * HalfNormalCdf(r * t) *
           NormalPdf(t);
  };
  const double upper = std::sqrt(2.0 * std::log(static_cast<double>(p))) + 10;
  auto q = IntegrateAdaptive(integrand, 0.0, upper);
  if (!q.ok()) return q.status();
  return std::clamp(q->value, 0.0, 1.0);
}

absl::StatusOr<RademacherPPlus> PPlusRademacher(double r, long long p) {
  if (auto s = CheckPositive(r, "r"); !s.ok()) return s;
  if (p < 1) return absl::InvalidArgumentError("p must be >= 1");
  return RademacherPPlus{HalfNormalCdf(r), p < 20};
}

absl::StatusOr<NPlusResult> NPlusFromF(double f, double delta, int k) {
  if (!(f >= 0 && f <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("F must lie in [0, 1], got ", f));
  }
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  const double l = std::log(1.0 / delta);
  const double fk = f * k;
  const double raw = fk + 0.5 * (l + std::sqrt(l * l + 8.0 * fk * l));
  NPlusResult out;
  out.f = f;
  if (raw >= k) {
    out.value = k;
    out.capped = raw > k;
  } else {
    out.value = static_cast<int>(std::ceil(raw));
  }
  return out;
}

absl::StatusOr<NPlusResult> NPlusBound(double norm_u, double beta,
                                       double delta, int k, long long p,
                                       NPlusFlavor flavor) {
  if (auto s = CheckPositive(norm_u, "norm_u"); !s.ok()) return s;
  if (auto s = CheckPositive(beta, "beta"); !s.ok()) return s;
  if (beta > norm_u) {
    return absl::FailedPreconditionError(absl::StrCat(
        "N+ bound requires beta <= norm_u, got beta=", beta,
        " norm_u=", norm_u));
  }
  const double r = beta / norm_u;
  double f;
  if (flavor == NPlusFlavor::kGaussian) {
    auto v = PPlusGaussian(r, p);
    if (!v.ok()) return v.status();
    f = *v;
  } else {
    auto v = PPlusRademacher(r, p);
    if (!v.ok()) return v.status();
    f = v->value;
  }
  return NPlusFromF(f, delta, k);
}

absl::StatusOr<NPlusResult> NPlusBoundOrCap(double norm_u, double beta,
                                            double delta, int k, long long p,
                                            NPlusFlavor flavor) {
  if (norm_u >= 0 && beta > norm_u && k >= 1) {
    NPlusResult out;
    out.value = k;
    out.f = 1.0;
    out.beta_exceeds_norm = true;
    return out;
  }
  return NPlusBound(norm_u, beta, delta, k, p, flavor);
}

absl::StatusOr<double> SignRpAngleVariance(double theta, int k) {
  if (auto s = CheckAngle(theta); !s.ok()) return s;
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  return theta * (kPi - theta) / k;
}

absl::StatusOr<double> RrVarianceFactor(double theta, double eps_prime) {
  if (auto s = CheckAngle(theta); !s.ok()) return s;
  if (!(eps_prime > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps_prime must be positive, got ", eps_prime));
  }
  const double base = theta * (kPi - theta);
  if (std::isinf(eps_prime) || eps_prime > 700) return base;
  const double e = std::exp(eps_prime);
  const double em1 = std::expm1(eps_prime);
  const double a = e / (em1 * em1);
  return base + 2.0 * kPi * kPi * a + 4.0 * kPi * kPi * a * a;
}

absl::StatusOr<double> RrAngleVariance(double theta, int k, double eps_prime) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  auto v = RrVarianceFactor(theta, eps_prime);
  if (!v.ok()) return v.status();
  return *v / k;
}

absl::StatusOr<double> InnerProductVariance(InnerProductKind kind,
                                            std::span<const double> u,
                                            std::span<const double> v, int k,
                                            double sigma) {
  if (u.size() != v.size() || u.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension mismatch: ", u.size(), " vs ", v.size()));
  }
  if (!(sigma >= 0) || !std::isfinite(sigma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("sigma must be nonnegative, got ", sigma));
  }
  const long long p = static_cast<long long>(u.size());
  double uu = 0, vv = 0, uv = 0, u2v2 = 0;
  for (size_t i = 0; i < u.size(); ++i) {
    uu += u[i] * u[i];
    vv += v[i] * v[i];
    uv += u[i] * v[i];
    u2v2 += u[i] * u[i] * v[i] * v[i];
  }
  const double s2 = sigma * sigma;
  const double noise_mixed = s2 * (uu + vv);
  if (kind == InnerProductKind::kRaw) {
    return noise_mixed + static_cast<double>(p) * s2 * s2;
  }
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (kind != InnerProductKind::kRpGaussian && k > p) {
    return absl::InvalidArgumentError(
        absl::StrCat("k must not exceed p, got k=", k, " p=", p));
  }
  const double noise = noise_mixed + k * s2 * s2;
  switch (kind) {
    case InnerProductKind::kRpGaussian:
      return noise + (uu * vv + uv * uv) / k;
    case InnerProductKind::kRp:
      return noise + (uu * vv + uv * uv - 2.0 * u2v2) / k;
    case InnerProductKind::kOporp: {
      const long long padded = (p + k - 1) / k * k;
      const double factor =
          padded == 1 ? 0.0
                      : static_cast<double>(padded - k) / (padded - 1);
      return noise + (uu * vv + uv * uv - 2.0 * u2v2) / k * factor;
    }
    case InnerProductKind::kRaw:
      break;
  }
  return absl::InternalError("unreachable");
}

absl::StatusOr<double> VarianceRatio(long long p, int k, double sigma) {
  if (p < 1 || k < 1) {
    return absl::InvalidArgumentError("p and k must be >= 1");
  }
  if (auto s = CheckPositive(sigma, "sigma"); !s.ok()) return s;
  const double s2 = sigma * sigma;
  return (2.0 * s2 + static_cast<double>(p) * s2 * s2) /
         (2.0 * s2 + k * s2 * s2 + 1.0 / k);
}

absl::StatusOr<double> OptimalKStar(double theta, double epsilon, double f) {
  if (auto s = CheckAngle(theta); !s.ok()) return s;
  if (auto s = CheckPositive(epsilon, "epsilon"); !s.ok()) return s;
  if (!(f > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("F must be positive, got ", f));
  }
  return epsilon * theta * (kPi - theta) / f;
}

}  // namespace dprp
