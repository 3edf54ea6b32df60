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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

#include "absl/strings/str_format.h"
#include "dprp/analytic.h"
#include "dprp/audit.h"
#include "dprp/dp_rp.h"
#include "dprp/dp_sign.h"
#include "dprp/estimators.h"
#include "dprp/mechanisms.h"
#include "dprp/oracle.h"
#include "dprp/projections.h"
#include "dprp/retrieval.h"
#include "dprp/rng.h"

namespace dprp {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;

  void Check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

double Seconds(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct SampleStats {
  double mean = 0;
  double var = 0;
};

SampleStats Stats(const std::vector<double>& x) {
  SampleStats s;
  for (double v : x) s.mean += v;
  s.mean /= x.size();
  for (double v : x) s.var += (v - s.mean) * (v - s.mean);
  s.var /= x.size() - 1;
  return s;
}

// Optimal Gaussian sigma: residual, linearity, dominance, runtime.
Outcome Ac1() {
  Outcome o;
  const auto t0 = Clock::now();
  double worst_residual = 0, worst_linear = 0;
  int cells = 0;
  for (double eps : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0}) {
    for (double delta : {1e-6, 1e-3}) {
      auto base = OptimalGaussianSigma(1, eps, delta);
      if (!base.ok()) {
        o.Check(false, base.status().ToString());
        continue;
      }
      for (double d2 : {0.5, 1.0, 2.0}) {
        auto s = OptimalGaussianSigma(d2, eps, delta);
        if (!s.ok()) {
          o.Check(false, s.status().ToString());
          continue;
        }
        ++cells;
        const double residual =
            std::abs(GaussianPrivacyProfile(*s, d2, eps) - delta);
        worst_residual = std::max(worst_residual, residual);
        worst_linear = std::max(worst_linear,
                                std::abs(*s / d2 - *base) / *base);
        auto classic = ClassicGaussianSigma(d2, eps, delta);
        if (classic.ok()) {
          o.Check(*s <= *classic,
                  absl::StrFormat("sigma* > classic at eps=%g", eps));
        }
      }
    }
  }
  const double secs = Seconds(t0);
  o.Check(worst_residual < 1e-12,
          absl::StrFormat("residual %.3g", worst_residual));
  o.Check(worst_linear <= 1e-12, absl::StrFormat("linearity %.3g", worst_linear));
  o.Check(secs < 1, absl::StrFormat("runtime %.3fs", secs));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "%d cells, max residual %.2g, max linearity error %.2g, %.3fs", cells,
        worst_residual, worst_linear, secs);
  }
  return o;
}

// Inner-product estimators under noise.
Outcome Ac2() {
  Outcome o;
  const int p = 64, k = 16, n = 100000;
  RngStream data = RngStream(2, kDataStream).Split("ac2");
  std::vector<double> u(p), v(p);
  for (int i = 0; i < p; ++i) {
    u[i] = 2 * data.Uniform() - 1;
    v[i] = 0.5 * u[i] + data.Uniform() - 0.5;
  }
  double truth = 0;
  for (int i = 0; i < p; ++i) truth += u[i] * v[i];
  const std::vector<double> sigmas = {0.1, 1.0};
  // [sigma][kind] estimates; kinds raw, rp, oporp.
  std::vector<std::vector<std::vector<double>>> est(
      2, std::vector<std::vector<double>>(3, std::vector<double>(n)));
  RngStream proj = RngStream(2, kProjectionStream).Split("ac2");
  RngStream noise = RngStream(2, kNoiseStream).Split("ac2");
  for (int d = 0; d < n; ++d) {
    const uint64_t seed = proj();
    auto rp = ProjectionOperator::Materialize(ProjectionSpec::Rademacher(p, k, seed));
    auto op = ProjectionOperator::Materialize(ProjectionSpec::Oporp(p, k, seed));
    if (!rp.ok() || !op.ok()) {
      o.Check(false, "projection failed");
      return o;
    }
    const auto rx = *rp->Project(u), ry = *rp->Project(v);
    const auto ox = *op->Project(u), oy = *op->Project(v);
    for (int s = 0; s < 2; ++s) {
      const double sg = sigmas[s];
      double raw = 0, r = 0, q = 0;
      for (int i = 0; i < p; ++i) {
        raw += (u[i] + sg * noise.Gaussian()) * (v[i] + sg * noise.Gaussian());
      }
      for (int j = 0; j < k; ++j) {
        r += (rx[j] + sg * noise.Gaussian()) * (ry[j] + sg * noise.Gaussian());
        q += (ox[j] + sg * noise.Gaussian()) * (oy[j] + sg * noise.Gaussian());
      }
      est[s][0][d] = raw;
      est[s][1][d] = r;
      est[s][2][d] = q;
    }
  }
  const InnerProductKind kinds[3] = {InnerProductKind::kRaw,
                                     InnerProductKind::kRp,
                                     InnerProductKind::kOporp};
  const char* names[3] = {"raw", "rp", "oporp"};
  double worst_z = 0, worst_rel = 0;
  for (int s = 0; s < 2; ++s) {
    for (int c = 0; c < 3; ++c) {
      const SampleStats st = Stats(est[s][c]);
      const double want = *InnerProductVariance(kinds[c], u, v, k, sigmas[s]);
      const double z = std::abs(st.mean - truth) / std::sqrt(st.var / n);
      const double rel = std::abs(st.var / want - 1);
      worst_z = std::max(worst_z, z);
      worst_rel = std::max(worst_rel, rel);
      o.Check(z <= 3, absl::StrFormat("%s sigma=%g mean off by %.2f s.e.",
                                      names[c], sigmas[s], z));
      o.Check(rel <= 0.05, absl::StrFormat("%s sigma=%g variance off by %.1f%%",
                                           names[c], sigmas[s], 100 * rel));
    }
  }
  if (o.pass) {
    o.detail = absl::StrFormat(
        "6 cells, max mean deviation %.2f s.e., max variance error %.2f%%",
        worst_z, 100 * worst_rel);
  }
  return o;
}

// Noise-free OPORP / RP variance ratio.
Outcome Ac3() {
  Outcome o;
  OracleQuery q;
  q.target = OracleTarget::kOporpRpRatio;
  q.p = 64;
  q.k = 16;
  auto r = MonteCarloOracle(q, 100000, 3);
  if (!r.ok()) {
    o.Check(false, r.status().ToString());
    return o;
  }
  const double want = 48.0 / 63;
  const double rel = std::abs(r->estimate / want - 1);
  o.Check(rel <= 0.10, absl::StrFormat("ratio %.4f vs %.4f", r->estimate, want));
  o.Check(std::abs(r->analytic - want) < 1e-15, "closed form is not 48/63");
  if (o.pass) {
    o.detail = absl::StrFormat("ratio %.4f vs 48/63 = %.4f (%.1f%% off)",
                               r->estimate, want, 100 * rel);
  }
  return o;
}

// Sign collision probability and angle-estimator variance.
Outcome Ac4() {
  Outcome o;
  const int p = 8, k = 100000;
  auto op = ProjectionOperator::Materialize(ProjectionSpec::Gaussian(p, k, 4));
  if (!op.ok()) {
    o.Check(false, op.status().ToString());
    return o;
  }
  double worst_z = 0, worst_rel = 0;
  RngStream rng = RngStream(4, kDataStream).Split("ac4");
  for (double theta : {std::numbers::pi / 6, std::numbers::pi / 3,
                       std::numbers::pi / 2, 2 * std::numbers::pi / 3}) {
    std::vector<double> u(p, 0.0), v(p, 0.0);
    u[0] = 1;
    v[0] = std::cos(theta);
    v[1] = std::sin(theta);
    const auto x = *op->Project(u), y = *op->Project(v);
    std::vector<int8_t> sx(k), sy(k);
    for (int j = 0; j < k; ++j) {
      sx[j] = SignOf(x[j]);
      sy[j] = SignOf(y[j]);
    }
    const double collision = 1 - double(HammingDistance(sx, sy)) / k;
    const double want = 1 - theta / std::numbers::pi;
    const double z =
        std::abs(collision - want) / std::sqrt(want * (1 - want) / k);
    worst_z = std::max(worst_z, z);
    o.Check(z <= 3, absl::StrFormat("collision at %.3f off by %.2f s.e.",
                                    theta, z));
    // Variance of theta-hat over repeated short sketches.
    const int reps = 20000, kk = 64;
    std::vector<double> est(reps);
    const double c = std::cos(theta), s = std::sin(theta);
    for (int r = 0; r < reps; ++r) {
      int diff = 0;
      for (int j = 0; j < kk; ++j) {
        const double z1 = rng.Gaussian(), z0 = rng.Gaussian();
        diff += SignOf(z1) != SignOf(c * z1 + s * z0);
      }
      est[r] = std::numbers::pi * diff / kk;
    }
    const double want_var = *SignRpAngleVariance(theta, kk);
    const double rel = std::abs(Stats(est).var / want_var - 1);
    worst_rel = std::max(worst_rel, rel);
    o.Check(rel <= 0.05, absl::StrFormat("Var(theta) at %.3f off by %.1f%%",
                                         theta, 100 * rel));
  }
  if (o.pass) {
    o.detail = absl::StrFormat(
        "4 angles, max collision deviation %.2f s.e., max variance error %.2f%%",
        worst_z, 100 * worst_rel);
  }
  return o;
}

// Randomized-response debiasing.
Outcome Ac5() {
  Outcome o;
  const int k = 10000, reps = 1000;
  const double theta = std::numbers::pi / 3;
  const double c = std::cos(theta), s = std::sin(theta);
  RngStream rng = RngStream(5, kDataStream).Split("ac5");
  double worst_z = 0, worst_rel = 0;
  for (double e : {0.5, 1.0, 2.0}) {
    const double flip = RrFlipProbability(e);
    std::vector<double> est(reps);
    for (int r = 0; r < reps; ++r) {
      int same = 0;
      for (int j = 0; j < k; ++j) {
        const double z1 = rng.Gaussian(), z0 = rng.Gaussian();
        int a = SignOf(z1), b = SignOf(c * z1 + s * z0);
        if (rng.Bernoulli(flip)) a = -a;
        if (rng.Bernoulli(flip)) b = -b;
        same += a == b;
      }
      const double debiased = RrCollisionDebias(double(same) / k, e);
      est[r] = std::numbers::pi * (1 - debiased);
    }
    const SampleStats st = Stats(est);
    const double z = std::abs(st.mean - theta) / std::sqrt(st.var / reps);
    const double rel = std::abs(st.var / *RrAngleVariance(theta, k, e) - 1);
    worst_z = std::max(worst_z, z);
    worst_rel = std::max(worst_rel, rel);
    o.Check(z <= 3, absl::StrFormat("eps'=%g mean off by %.2f s.e.", e, z));
    o.Check(rel <= 0.10,
            absl::StrFormat("eps'=%g variance off by %.1f%%", e, 100 * rel));
  }
  const double f2 = RrFlipProbability(2);
  o.Check(f2 == 1 / (std::exp(2.0) + 1),
          absl::StrFormat("flip(2) = %.17g", f2));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "3 budgets, max mean deviation %.2f s.e., max variance error %.1f%%, "
        "flip(2) = %.17g",
        worst_z, 100 * worst_rel, f2);
  }
  return o;
}

// Sign-change probability P+.
Outcome Ac6() {
  Outcome o;
  double worst = 0, worst_rad = 0;
  uint64_t seed = 60;
  for (double r : {0.1, 0.5, 1.0}) {
    for (long long p : {10LL, 100LL, 1000LL}) {
      OracleQuery q;
      q.target = OracleTarget::kPPlusGaussian;
      q.r = r;
      q.p = p;
      auto m = MonteCarloOracle(q, 10000000, ++seed);
      if (!m.ok()) {
        o.Check(false, m.status().ToString());
        continue;
      }
      const double d = std::abs(m->estimate - m->analytic);
      worst = std::max(worst, d);
      o.Check(d <= 0.005, absl::StrFormat("P+(%g, %lld) off by %.4f", r, p, d));
    }
    OracleQuery q;
    q.target = OracleTarget::kPPlusRademacher;
    q.r = r;
    q.p = 1000;
    auto m = MonteCarloOracle(q, 200000, ++seed);
    if (!m.ok()) {
      o.Check(false, m.status().ToString());
      continue;
    }
    const double d = std::abs(m->estimate - m->analytic);
    worst_rad = std::max(worst_rad, d);
    o.Check(d <= 0.005,
            absl::StrFormat("Rademacher P+(%g, 1000) off by %.4f", r, d));
  }
  auto big = PPlusGaussian(0.1, 1000000);
  o.Check(big.ok() && *big < 0.4,
          big.ok() ? absl::StrFormat("P+(0.1, 1e6) = %.4f", *big)
                   : big.status().ToString());
  if (o.pass) {
    o.detail = absl::StrFormat(
        "9 Gaussian cells max error %.4f, Rademacher max error %.4f, "
        "P+(0.1, 1e6) = %.4f",
        worst, worst_rad, *big);
  }
  return o;
}

// Coverage of the sign-change bound N+.
Outcome Ac7() {
  Outcome o;
  OracleQuery q;
  q.target = OracleTarget::kNPlusExceedance;
  q.p = 256;
  q.k = 128;
  q.beta = 1;
  q.norm = 10;
  q.delta = 0.01;
  const long long n = 10000;
  auto r = MonteCarloOracle(q, n, 7);
  if (!r.ok()) {
    o.Check(false, r.status().ToString());
    return o;
  }
  const double limit = 0.01 + 3 * std::sqrt(0.01 * 0.99 / n);
  o.Check(r->estimate <= limit,
          absl::StrFormat("exceedance %.4f > %.4f", r->estimate, limit));
  if (o.pass) {
    o.detail = absl::StrFormat("exceedance %.4f <= %.4f over %lld matrices",
                               r->estimate, limit, n);
  }
  return o;
}

// Exact privacy audits.
Outcome Ac8() {
  Outcome o;
  int audits = 0, mutants = 0;
  double worst_margin = -INFINITY;
  auto run = [&](AuditSetup s, bool expect_pass, const std::string& label) {
    auto r = RunAudit(s);
    if (!r.ok()) {
      o.Check(false, label + ": " + r.status().ToString());
      return;
    }
    bool all = true;
    for (const auto& rep : *r) {
      all = all && rep.pass;
      if (expect_pass) worst_margin = std::max(worst_margin, rep.margin);
      if (s.mechanism.rfind("signoporp_", 0) == 0) {
        o.Check(rep.max_changed_bits <= s.t,
                label + " changed more than t bits");
      }
    }
    if (expect_pass) {
      ++audits;
      o.Check(all, label + " failed: " + (*r)[0].Summary());
    } else {
      ++mutants;
      o.Check(!all, label + " mutation was not detected");
    }
  };
  for (double eps : {0.5, 1.0, 2.0, 5.0}) {
    AuditSetup s;
    s.epsilon = eps;
    s.p = 5;
    s.k = 6;
    for (const char* m : {"signrp_rr", "signrp_rr_smooth"}) {
      s.mechanism = m;
      run(s, true, absl::StrFormat("%s eps=%g", m, eps));
    }
    s.p = 6;
    s.k = 4;
    for (const char* m : {"signoporp_rr", "signoporp_rr_smooth"}) {
      for (int t : {1, 2, 4}) {
        s.mechanism = m;
        s.t = t;
        run(s, true, absl::StrFormat("%s eps=%g t=%d", m, eps, t));
      }
    }
    s.t = 1;
    s.p = 4;
    s.k = 8;
    s.delta = 1e-3;
    for (const char* m : {"idp_signrp_rr", "idp_signrp_g"}) {
      s.mechanism = m;
      run(s, true, absl::StrFormat("%s eps=%g", m, eps));
    }
  }
  struct Mutant {
    const char* mechanism;
    Mutation mutation;
  };
  for (const Mutant& m : {Mutant{"signrp_rr", Mutation::kHalvedFlip},
                          Mutant{"signrp_rr_smooth", Mutation::kHalvedFlip},
                          Mutant{"signoporp_rr", Mutation::kHalvedFlip},
                          Mutant{"signoporp_rr_smooth", Mutation::kHalvedFlip},
                          Mutant{"signoporp_rr", Mutation::kDroppedCoin},
                          Mutant{"signoporp_rr_smooth", Mutation::kDroppedCoin},
                          Mutant{"idp_signrp_rr", Mutation::kHalvedFlip},
                          Mutant{"idp_signrp_g", Mutation::kHalvedSigma}}) {
    AuditSetup s;
    s.mechanism = m.mechanism;
    s.mutation = m.mutation;
    s.epsilon = 1;
    s.delta = 1e-3;
    s.p = 6;
    s.k = 4;
    run(s, false,
        absl::StrFormat("%s/%s", m.mechanism, MutationName(m.mutation)));
  }
  if (o.pass) {
    o.detail = absl::StrFormat(
        "%d configurations pass (max margin %.2g), %d mutants rejected",
        audits, worst_margin, mutants);
  }
  return o;
}

// Sensitivity: Rademacher exactness and Gaussian high-probability bounds.
Outcome Ac9() {
  Outcome o;
  for (int k : {1, 16, 100, 256}) {
    for (double beta : {0.5, 1.0, 3.0}) {
      DpRpConfig cfg;
      cfg.variant = DpRpVariant::kRpGOptB;
      cfg.spec = ProjectionSpec::Rademacher(300, k, 9);
      cfg.budget.epsilon = 1;
      cfg.budget.delta = 1e-6;
      cfg.budget.beta = beta;
      auto m = DpRpMechanism::Create(cfg);
      if (!m.ok()) {
        o.Check(false, m.status().ToString());
        continue;
      }
      o.Check(m->calibration().sensitivity.l2 == beta,
              absl::StrFormat("k=%d beta=%g gives %.17g", k, beta,
                              m->calibration().sensitivity.l2));
    }
  }
  const int p = 128, k = 32, draws = 10000;
  const double d = 0.05;
  const double l2 = *SensitivityL2Bound(p, k, 1, d);
  const double l1 = *SensitivityL1Bound(p, k, 1, d);
  RngStream rng = RngStream(9, kProjectionStream).Split("ac9");
  int over2 = 0, over1 = 0;
  Eigen::MatrixXd w(p, k);
  for (int t = 0; t < draws; ++t) {
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < k; ++j) w(i, j) = rng.Gaussian();
    }
    const auto s = *SensitivityFromMatrix(w, 1);
    over2 += s.l2 > l2;
    over1 += s.l1 > l1;
  }
  o.Check(over2 <= d * draws, absl::StrFormat("l2 bound exceeded %d times", over2));
  o.Check(over1 <= d * draws, absl::StrFormat("l1 bound exceeded %d times", over1));
  if (o.pass) {
    o.detail = absl::StrFormat(
        "Rademacher Delta2 == beta in 12 cases; bounds exceeded %d (l2) and "
        "%d (l1) of %d draws, allowed %d",
        over2, over1, draws, int(d * draws));
  }
  return o;
}

// Retrieval benchmark orderings.
Outcome Ac10() {
  Outcome o;
  const auto t0 = Clock::now();
  RetrievalConfig cfg;
  auto data = MakeSyntheticData(cfg.data);
  if (!data.ok()) {
    o.Check(false, data.status().ToString());
    return o;
  }
  cfg.r_grid = {10};
  cfg.knn = 0;
  cfg.seeds.clear();
  for (uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
  cfg.mechanisms = {{"signrp", {}, 256},
                    {"rp_g", {5, 10, 20}, 256},
                    {"rp_g_opt", {5, 10, 20}, 256},
                    {"rp_g_opt_b", {5, 10, 20}, 256},
                    {"signoporp_rr", {5, 10}, 256, 4},
                    {"signoporp_rr_smooth", {5, 10}, 256, 4},
                    {"idp_signrp_rr", {0.5}, 256}};
  auto rows = RunRetrieval(*data, cfg);
  if (!rows.ok()) {
    o.Check(false, rows.status().ToString());
    return o;
  }
  auto prec = [&](const std::string& m, double e) {
    const MetricRow* r = FindMetric(*rows, m, e, 10, "precision");
    return r ? r->mean : NAN;
  };
  std::string summary;
  for (double e : {5.0, 10.0, 20.0}) {
    const double g = prec("rp_g", e), opt = prec("rp_g_opt", e),
                 b = prec("rp_g_opt_b", e);
    o.Check(opt > g, absl::StrFormat("eps=%g rp_g_opt %.4f <= rp_g %.4f", e,
                                     opt, g));
    o.Check(b >= opt, absl::StrFormat("eps=%g rp_g_opt_b %.4f < rp_g_opt %.4f",
                                      e, b, opt));
    summary += absl::StrFormat("eps=%g g/opt/opt_b %.3f/%.3f/%.3f; ", e, g, opt, b);
  }
  for (double e : {5.0, 10.0}) {
    const double rr = prec("signoporp_rr", e), sm = prec("signoporp_rr_smooth", e);
    o.Check(sm > rr, absl::StrFormat("eps=%g signoporp smooth %.4f <= rr %.4f",
                                     e, sm, rr));
    summary += absl::StrFormat("eps=%g signoporp rr/smooth %.3f/%.3f; ", e, rr, sm);
  }
  const double idp = prec("idp_signrp_rr", 0.5), plain = prec("signrp", INFINITY);
  o.Check(idp >= 0.9 * plain,
          absl::StrFormat("idp %.4f < 0.9 x signrp %.4f", idp, plain));
  const double secs = Seconds(t0);
  o.Check(secs < 600, absl::StrFormat("runtime %.0fs", secs));
  if (o.pass) {
    o.detail = summary + absl::StrFormat("idp/signrp %.3f/%.3f; %.1fs", idp,
                                         plain, secs);
  }
  return o;
}

}  // namespace
}  // namespace dprp

int main() {
  const std::vector<std::function<dprp::Outcome()>> criteria = {
      dprp::Ac1, dprp::Ac2, dprp::Ac3, dprp::Ac4, dprp::Ac5,
      dprp::Ac6, dprp::Ac7, dprp::Ac8, dprp::Ac9, dprp::Ac10};
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const dprp::Outcome o = criteria[i]();
    failed += !o.pass;
    std::printf("AC%zu %s %s\n", i + 1, o.pass ? "PASS" : "FAIL",
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
