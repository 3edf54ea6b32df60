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

#include "dprp/oracle.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "Eigen/Core"
#include "absl/strings/str_cat.h"
#include "boost/math/distributions/normal.hpp"
#include "dprp/analytic.h"
#include "dprp/dp_sign.h"
#include "dprp/estimators.h"
#include "dprp/projections.h"
#include "dprp/rng.h"

namespace dprp {
namespace {

OracleResult Proportion(long long hits, long long n, double analytic) {
  OracleResult r;
  r.samples = n;
  r.estimate = static_cast<double>(hits) / n;
  r.standard_error = std::sqrt(r.estimate * (1 - r.estimate) / n);
  r.analytic = analytic;
  return r;
}

std::vector<double> UnitVector(long long p, RngStream& rng) {
  std::vector<double> u(p);
  double sq = 0;
  for (auto& x : u) {
    x = rng.Gaussian();
    sq += x * x;
  }
  for (auto& x : u) x /= std::sqrt(sq);
  return u;
}

absl::StatusOr<OracleResult> Collision(const OracleQuery& q, long long n,
                                       RngStream& rng) {
  if (!(q.theta >= 0 && q.theta <= std::numbers::pi)) {
    return absl::InvalidArgumentError("theta must lie in [0, pi]");
  }
  const bool rr = std::isfinite(q.eps_prime);
  if (rr && !(q.eps_prime > 0)) {
    return absl::InvalidArgumentError("eps_prime must be positive");
  }
  const double flip = rr ? RrFlipProbability(q.eps_prime) : 0;
  const double c = std::cos(q.theta), s = std::sin(q.theta);
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    const double z1 = rng.Gaussian(), z0 = rng.Gaussian();
    int a = SignOf(z1), b = SignOf(c * z1 + s * z0);
    if (rr) {
      if (rng.Bernoulli(flip)) a = -a;
      if (rng.Bernoulli(flip)) b = -b;
    }
    hits += a == b;
  }
  const double clean = 1 - q.theta / std::numbers::pi;
  return Proportion(hits, n, rr ? RrCollisionForward(clean, q.eps_prime) : clean);
}

absl::StatusOr<OracleResult> PPlusGaussianMc(const OracleQuery& q, long long n,
                                             RngStream& rng) {
  auto analytic = PPlusGaussian(q.r, q.p);
  if (!analytic.ok()) return analytic.status();
  const boost::math::normal normal;
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    // max_i |Z_i| by inversion: Pr(max <= t) = (2 Phi(t) - 1)^p.
    const double tail = -std::expm1(std::log(rng.UniformOpen()) / q.p) / 2;
    const double max_abs = boost::math::quantile(complement(normal, tail));
    hits += q.r * max_abs >= std::abs(rng.Gaussian());
  }
  return Proportion(hits, n, *analytic);
}

absl::StatusOr<OracleResult> PPlusRademacherMc(const OracleQuery& q,
                                               long long n, RngStream& rng) {
  auto analytic = PPlusRademacher(q.r, q.p);
  if (!analytic.ok()) return analytic.status();
  RngStream data = rng.Split("u");
  const std::vector<double> u = UnitVector(q.p, data);
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    double x = 0;
    uint64_t bits = 0;
    for (long long j = 0; j < q.p; ++j) {
      if (j % 64 == 0) bits = rng();
      x += (bits & 1) ? u[j] : -u[j];
      bits >>= 1;
    }
    hits += std::abs(x) <= q.r;
  }
  return Proportion(hits, n, analytic->value);
}

struct Moments {
  double mean = 0;
  double var = 0;
  // Standard error of var.
  double var_se = 0;
};

Moments MomentsOf(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= n;
  double m2 = 0, m4 = 0;
  for (double v : x) {
    const double d = (v - m.mean) * (v - m.mean);
    m2 += d;
    m4 += d * d;
  }
  m.var = m2 / (n - 1);
  m4 /= n;
  m.var_se = std::sqrt(std::max(0.0, m4 - (m2 / n) * (m2 / n)) / n);
  return m;
}

absl::StatusOr<OracleResult> OporpRpRatio(const OracleQuery& q, long long n,
                                          RngStream& rng) {
  RngStream data = rng.Split("uv");
  std::vector<double> u(q.p), v(q.p);
  for (auto& x : u) x = data.Gaussian();
  for (auto& x : v) x = data.Gaussian();
  auto ip = [&](const ProjectionSpec& spec) -> absl::StatusOr<double> {
    auto op = ProjectionOperator::Materialize(spec);
    if (!op.ok()) return op.status();
    auto x = op->Project(u);
    if (!x.ok()) return x.status();
    auto y = op->Project(v);
    if (!y.ok()) return y.status();
    double s = 0;
    for (size_t j = 0; j < x->size(); ++j) s += (*x)[j] * (*y)[j];
    return s;
  };
  std::vector<double> oporp(n), rp(n);
  for (long long i = 0; i < n; ++i) {
    const uint64_t seed = rng();
    auto a = ip(ProjectionSpec::Oporp(q.p, q.k, seed));
    if (!a.ok()) return a.status();
    auto b = ip(ProjectionSpec::Rademacher(q.p, q.k, seed));
    if (!b.ok()) return b.status();
    oporp[i] = *a;
    rp[i] = *b;
  }
  const Moments mo = MomentsOf(oporp), mr = MomentsOf(rp);
  OracleResult r;
  r.samples = n;
  r.estimate = mo.var / mr.var;
  r.standard_error =
      r.estimate * std::hypot(mo.var_se / mo.var, mr.var_se / mr.var);
  // Noise-free OPORP variance is (p - k) / (p - 1) times that of RP, with p
  // the zero-padded length.
  const double padded = std::ceil(static_cast<double>(q.p) / q.k) * q.k;
  r.analytic = (padded - q.k) / (padded - 1);
  return r;
}

absl::StatusOr<OracleResult> NPlusExceedance(const OracleQuery& q, long long n,
                                             RngStream& rng) {
  auto bound = NPlusBound(q.norm, q.beta, q.delta, q.k, q.p,
                          NPlusFlavor::kGaussian);
  if (!bound.ok()) return bound.status();
  RngStream data = rng.Split("u");
  std::vector<double> u = UnitVector(q.p, data);
  for (auto& x : u) x *= q.norm;
  long long hits = 0;
  for (long long i = 0; i < n; ++i) {
    int changes = 0;
    for (int j = 0; j < q.k; ++j) {
      double x = 0, max_abs = 0;
      for (long long l = 0; l < q.p; ++l) {
        const double w = rng.Gaussian();
        x += w * u[l];
        max_abs = std::max(max_abs, std::abs(w));
      }
      changes += std::abs(x) <= q.beta * max_abs;
    }
    hits += changes > bound->value;
  }
  return Proportion(hits, n, q.delta);
}

}  // namespace

std::string OracleTargetName(OracleTarget t) {
  switch (t) {
    case OracleTarget::kCollision:
      return "collision";
    case OracleTarget::kPPlusGaussian:
      return "p_plus_gaussian";
    case OracleTarget::kPPlusRademacher:
      return "p_plus_rademacher";
    case OracleTarget::kOporpRpRatio:
      return "oporp_rp_ratio";
    case OracleTarget::kNPlusExceedance:
      return "n_plus_exceedance";
  }
  return "unknown";
}

absl::StatusOr<OracleTarget> ParseOracleTarget(std::string_view name) {
  for (OracleTarget t :
       {OracleTarget::kCollision, OracleTarget::kPPlusGaussian,
        OracleTarget::kPPlusRademacher, OracleTarget::kOporpRpRatio,
        OracleTarget::kNPlusExceedance}) {
    if (name == OracleTargetName(t)) return t;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown oracle target '", std::string(name),
      "'; expected one of collision, p_plus_gaussian, p_plus_rademacher, "
      "oporp_rp_ratio, n_plus_exceedance"));
}

absl::StatusOr<OracleResult> MonteCarloOracle(const OracleQuery& query,
                                              long long n, uint64_t seed) {
  if (n < 100) {
    return absl::InvalidArgumentError(
        absl::StrCat("oracle needs at least 100 samples, got ", n));
  }
  if (query.p < 1 || query.k < 1) {
    return absl::InvalidArgumentError("p and k must be >= 1");
  }
  RngStream rng =
      RngStream(seed, kDataStream).Split(OracleTargetName(query.target));
  switch (query.target) {
    case OracleTarget::kCollision:
      return Collision(query, n, rng);
    case OracleTarget::kPPlusGaussian:
      return PPlusGaussianMc(query, n, rng);
    case OracleTarget::kPPlusRademacher:
      return PPlusRademacherMc(query, n, rng);
    case OracleTarget::kOporpRpRatio:
      return OporpRpRatio(query, n, rng);
    case OracleTarget::kNPlusExceedance:
      return NPlusExceedance(query, n, rng);
  }
  return absl::InvalidArgumentError("unknown oracle target");
}

}  // namespace dprp
