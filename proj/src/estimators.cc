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

#include "dprp/estimators.h"

#include <bit>
#include <cmath>
#include <numbers>

#include "absl/strings/str_cat.h"
#include "dprp/analytic.h"

namespace dprp {
namespace {

constexpr double kPi = std::numbers::pi;

std::string DigestPair(const Sketch& a, const Sketch& b) {
  uint64_t h = 0;
  for (const Sketch* s : {&a, &b}) {
    if (s->is_sign()) {
      h = Fnv1a64({reinterpret_cast<const unsigned char*>(s->signs.data()),
                   s->signs.size()},
                  h);
    } else {
      h = Fnv1a64({reinterpret_cast<const unsigned char*>(s->values.data()),
                   s->values.size() * sizeof(double)},
                  h);
    }
    const std::string tag =
        absl::StrCat(s->provenance.mechanism, "|", s->provenance.spec_digest);
    h = Fnv1a64({reinterpret_cast<const unsigned char*>(tag.data()),
                 tag.size()},
                h);
  }
  return HexDigest(h);
}

absl::Status CheckCompatible(const Sketch& a, const Sketch& b, bool sign) {
  if (a.is_sign() != sign || b.is_sign() != sign) {
    return absl::InvalidArgumentError(
        sign ? "angle estimators need sign sketches"
             : "inner-product estimators need real sketches");
  }
  if (a.size() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sketch length mismatch: ", a.size(), " vs ", b.size()));
  }
  if (a.provenance.spec_digest != b.provenance.spec_digest ||
      a.provenance.projection_kind != b.provenance.projection_kind) {
    return absl::InvalidArgumentError(
        "provenance mismatch: sketches come from different projections");
  }
  if (a.size() == 0) return absl::InvalidArgumentError("empty sketches");
  return absl::OkStatus();
}

std::optional<InnerProductKind> KindOf(const Provenance& pv) {
  if (pv.projection_kind == "raw") return InnerProductKind::kRaw;
  if (pv.projection_kind == "oporp") return InnerProductKind::kOporp;
  if (pv.projection_kind == "gaussian") return InnerProductKind::kRpGaussian;
  if (pv.projection_kind == "rademacher") return InnerProductKind::kRp;
  return std::nullopt;
}

}  // namespace

absl::StatusOr<EstimateReport> InnerProduct(
    const Sketch& x, const Sketch& y,
    const std::optional<InnerProductTruth>& truth) {
  if (auto s = CheckCompatible(x, y, /*sign=*/false); !s.ok()) return s;
  EstimateReport r;
  r.estimator = "inner_product";
  r.inputs_digest = DigestPair(x, y);
  double dot = 0;
  for (size_t j = 0; j < x.values.size(); ++j) dot += x.values[j] * y.values[j];
  r.estimate = dot;

  const auto kind = KindOf(x.provenance);
  const double sigma = x.provenance.sigma;
  const bool gaussian_noise = x.provenance.lambda == 0;
  if (!kind || !gaussian_noise || sigma != y.provenance.sigma) return r;
  const int k = static_cast<int>(x.values.size());
  if (truth) {
    auto v = InnerProductVariance(*kind, truth->u, truth->v, k, sigma);
    if (v.ok()) r.variance = *v;
    return r;
  }
  // Plug-in: ||u||^2 is estimated by ||x||^2 minus its noise mean.
  const double s2 = sigma * sigma;
  double xx = 0, yy = 0;
  for (size_t j = 0; j < x.values.size(); ++j) {
    xx += x.values[j] * x.values[j];
    yy += y.values[j] * y.values[j];
  }
  const double n = static_cast<double>(x.values.size());
  const double uu = std::max(0.0, xx - n * s2);
  const double vv = std::max(0.0, yy - n * s2);
  double var = s2 * (uu + vv) + n * s2 * s2;
  if (*kind != InnerProductKind::kRaw) {
    var += (uu * vv + dot * dot) / n;
  }
  r.variance = var;
  return r;
}

absl::StatusOr<EstimateReport> CosineNormalized(const Sketch& x,
                                                const Sketch& y) {
  if (auto s = CheckCompatible(x, y, /*sign=*/false); !s.ok()) return s;
  double xx = 0, yy = 0, xy = 0;
  for (size_t j = 0; j < x.values.size(); ++j) {
    xx += x.values[j] * x.values[j];
    yy += y.values[j] * y.values[j];
    xy += x.values[j] * y.values[j];
  }
  if (xx == 0 || yy == 0) {
    return absl::InvalidArgumentError("cosine of a zero-norm sketch");
  }
  EstimateReport r;
  r.estimator = "cosine_normalized";
  r.inputs_digest = DigestPair(x, y);
  r.estimate = xy / (std::sqrt(xx) * std::sqrt(yy));
  return r;
}

absl::StatusOr<EstimateReport> AngleFromSigns(const Sketch& a,
                                              const Sketch& b) {
  if (auto s = CheckCompatible(a, b, /*sign=*/true); !s.ok()) return s;
  const int k = static_cast<int>(a.signs.size());
  const int collisions = k - HammingDistance(a.signs, b.signs);
  EstimateReport r;
  r.estimator = "angle_from_signs";
  r.inputs_digest = DigestPair(a, b);
  r.estimate = kPi * (1.0 - static_cast<double>(collisions) / k);
  r.variance = r.estimate * (kPi - r.estimate) / k;
  return r;
}

double RrCollisionForward(double collision, double eps_prime) {
  const double e = std::exp(eps_prime);
  const double em1 = std::expm1(eps_prime);
  return collision * (em1 * em1) / ((e + 1) * (e + 1)) +
         2.0 * e / ((e + 1) * (e + 1));
}

double RrCollisionDebias(double noisy_collision, double eps_prime) {
  const double e = std::exp(eps_prime);
  const double em1 = std::expm1(eps_prime);
  return (e + 1) * (e + 1) / (em1 * em1) * noisy_collision -
         2.0 * e / (em1 * em1);
}

absl::StatusOr<EstimateReport> AngleFromRrSigns(const Sketch& a,
                                                const Sketch& b,
                                                double eps_prime) {
  if (auto s = CheckCompatible(a, b, /*sign=*/true); !s.ok()) return s;
  if (!(eps_prime > 0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eps_prime must be positive, got ", eps_prime));
  }
  for (const Sketch* s : {&a, &b}) {
    if (s->provenance.heterogeneous_flips) {
      return absl::InvalidArgumentError(
          "no debiased angle estimator for per-bit budgets; use Hamming "
          "distance");
    }
    if (s->provenance.eps_prime &&
        std::abs(*s->provenance.eps_prime - eps_prime) >
            1e-12 * std::max(1.0, eps_prime)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "eps_prime mismatch: sketch recorded ", *s->provenance.eps_prime,
          ", requested ", eps_prime));
    }
  }
  const int k = static_cast<int>(a.signs.size());
  const double frac =
      static_cast<double>(k - HammingDistance(a.signs, b.signs)) / k;
  EstimateReport r;
  r.estimator = "angle_from_rr_signs";
  r.inputs_digest = DigestPair(a, b);
  if (std::isinf(eps_prime)) {
    r.estimate = kPi * (1.0 - frac);
  } else {
    r.estimate = kPi * (1.0 - RrCollisionDebias(frac, eps_prime));
  }
  r.out_of_range = r.estimate < 0 || r.estimate > kPi;
  auto v = RrAngleVariance(std::clamp(r.estimate, 0.0, kPi), k, eps_prime);
  if (v.ok()) r.variance = *v;
  return r;
}

int HammingDistance(std::span<const int8_t> a, std::span<const int8_t> b) {
  int d = 0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t j = 0; j < n; ++j) d += a[j] != b[j];
  return d;
}

std::vector<uint64_t> PackWords(std::span<const int8_t> signs) {
  std::vector<uint64_t> words((signs.size() + 63) / 64, 0);
  for (size_t j = 0; j < signs.size(); ++j) {
    if (signs[j] > 0) words[j / 64] |= uint64_t{1} << (j % 64);
  }
  return words;
}

int HammingDistancePacked(std::span<const uint64_t> a,
                          std::span<const uint64_t> b) {
  int d = 0;
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) d += std::popcount(a[i] ^ b[i]);
  return d;
}

}  // namespace dprp
