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

#include "dprp/audit.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dprp/dp_rp.h"
#include "dprp/idp_sign.h"
#include "dprp/normal.h"
#include "dprp/projections.h"
#include "dprp/quadrature.h"
#include "dprp/rng.h"

namespace dprp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kMaxEnumeratedBits = 24;

// log(a / b) with log(0 / 0) = 0.
double LogRatio(double a, double b) {
  if (a == b) return 0;
  if (b == 0) return kInf;
  if (a == 0) return -kInf;
  return std::log(a / b);
}

// Worst log-ratio over all outputs of independent bits: sum over bits of the
// worse of the two values.
double WorstOutputLogRatio(const BitLaw& p, const BitLaw& q) {
  double total = 0;
  for (size_t j = 0; j < p.size(); ++j) {
    total += std::max(LogRatio(p.plus[j], q.plus[j]),
                      LogRatio(p.minus[j], q.minus[j]));
  }
  return total;
}

struct Worst {
  double value = -kInf;
  int base = -1;
  int coordinate = -1;
  double shift = 0;
  int bit = -1;

  void Offer(double v, int b, const Neighbour& n, int j) {
    if (v > value) {
      value = v;
      base = b;
      coordinate = n.coordinate;
      shift = n.shift;
      bit = j;
    }
  }
};

AuditReport Finish(const std::string& mechanism, AuditScope scope, double eps,
                   double delta, double claim, double tolerance,
                   const Worst& w, int neighbours, int changed) {
  AuditReport r;
  r.mechanism = mechanism;
  r.scope = scope;
  r.claimed_epsilon = eps;
  r.claimed_delta = delta;
  r.worst = neighbours > 0 ? w.value : 0;
  r.margin = r.worst - claim;
  r.pass = r.margin <= tolerance;
  r.neighbours = neighbours;
  r.worst_base = w.base;
  r.worst_coordinate = w.coordinate;
  r.worst_shift = w.shift;
  r.worst_bit = w.bit;
  r.max_changed_bits = changed;
  return r;
}

std::vector<std::vector<double>> DefaultBases(int p, uint64_t seed) {
  RngStream rng = RngStream(seed, kDataStream).Split("audit");
  std::vector<double> dense(p), sparse(p, 0.0), small(p);
  for (int i = 0; i < p; ++i) dense[i] = 2 * rng.Uniform() - 1;
  sparse[0] = 0.9;
  for (int i = 0; i < p; ++i) small[i] = 0.05 * dense[i];
  return {dense, sparse, small};
}

LawFn FlipPlanLaw(std::function<absl::StatusOr<FlipPlan>(
                      std::span<const double>)> plan,
                  Mutation m) {
  return [plan = std::move(plan), m](std::span<const double>,
                                     std::span<const double> input)
             -> absl::StatusOr<BitLaw> {
    auto p = plan(input);
    if (!p.ok()) return p.status();
    return MutatedLaw(*p, m);
  };
}

void HalveSmallerSide(BitLaw& law) {
  for (size_t j = 0; j < law.size(); ++j) {
    double& small = law.plus[j] < law.minus[j] ? law.plus[j] : law.minus[j];
    double& large = law.plus[j] < law.minus[j] ? law.minus[j] : law.plus[j];
    if (small == 0) continue;
    small /= 2;
    large = 1 - small;
  }
}

absl::StatusOr<ProjectionSpec> DenseSpec(const AuditSetup& s,
                                         const std::string& fallback) {
  auto kind = ParseProjectionKind(s.projection.empty() ? fallback : s.projection);
  if (!kind.ok()) return kind.status();
  return ProjectionSpec{*kind, s.p, s.k, 1.0, s.seed};
}

absl::StatusOr<std::vector<AuditReport>> RunSignAudit(const AuditSetup& s) {
  PrivacyBudget budget;
  budget.epsilon = s.epsilon;
  budget.beta = s.beta;
  AuditCase c;
  c.mechanism = s.mechanism;
  c.bases = s.bases.empty() ? DefaultBases(s.p, s.seed) : s.bases;
  c.beta = s.beta;
  c.grid_points = s.grid_points;
  double per_bit = 0;
  if (s.mechanism == "signrp_rr" || s.mechanism == "signrp_rr_smooth") {
    auto spec = DenseSpec(s, "gaussian");
    if (!spec.ok()) return spec.status();
    auto op = ProjectionOperator::Materialize(*spec);
    if (!op.ok()) return op.status();
    auto mech = SignRpMechanism::Create(
        *std::move(op), budget,
        s.mechanism == "signrp_rr" ? SignRpVariant::kRr
                                   : SignRpVariant::kRrSmooth);
    if (!mech.ok()) return mech.status();
    c.law = FlipPlanLaw(
        [mech = *std::move(mech)](std::span<const double> u) {
          return mech.Plan(u);
        },
        s.mutation);
    per_bit = s.epsilon / s.k;
  } else {
    budget.repetitions = s.t;
    auto mech = SignOporpMechanism::Create(ProjectionSpec::Oporp(s.p, s.k, s.seed),
                                           budget,
                                           s.mechanism == "signoporp_rr"
                                               ? SignOporpVariant::kRr
                                               : SignOporpVariant::kRrSmooth);
    if (!mech.ok()) return mech.status();
    c.law = FlipPlanLaw(
        [mech = *std::move(mech)](std::span<const double> u) {
          return mech.Plan(u);
        },
        s.mutation);
    per_bit = s.epsilon / s.t;
  }
  std::vector<AuditReport> out;
  c.scope = AuditScope::kPerBit;
  c.epsilon = per_bit;
  auto a = AuditPrivacy(c);
  if (!a.ok()) return a.status();
  out.push_back(*a);
  c.scope = AuditScope::kComposed;
  c.epsilon = s.epsilon;
  auto b = AuditPrivacy(c);
  if (!b.ok()) return b.status();
  out.push_back(*b);
  return out;
}

absl::StatusOr<std::vector<AuditReport>> RunIdpAudit(const AuditSetup& s) {
  const bool gaussian = s.mechanism == "idp_signrp_g";
  PrivacyBudget budget;
  budget.epsilon = s.epsilon;
  budget.delta = gaussian ? s.delta : 0;
  budget.beta = s.beta;
  auto spec = DenseSpec(s, "rademacher");
  if (!spec.ok()) return spec.status();
  auto op = ProjectionOperator::Materialize(*spec);
  if (!op.ok()) return op.status();
  auto mech = IdpSignMechanism::Create(
      *std::move(op), budget, gaussian ? IdpVariant::kGaussian : IdpVariant::kRr,
      /*allow_general_dense=*/true);
  if (!mech.ok()) return mech.status();
  AuditCase c;
  c.mechanism = s.mechanism;
  c.bases = s.bases.empty() ? DefaultBases(s.p, s.seed) : s.bases;
  c.beta = s.beta;
  c.grid_points = s.grid_points;
  c.scope = AuditScope::kIdp;
  c.epsilon = s.epsilon;
  c.delta = budget.delta;
  const Mutation m = s.mutation;
  c.law = [mech = *std::move(mech), m](std::span<const double> reference,
                                       std::span<const double> input)
      -> absl::StatusOr<BitLaw> {
    auto plan = mech.Plan(reference);
    if (!plan.ok()) return plan.status();
    if (m == Mutation::kHalvedSigma) plan->sigma /= 2;
    auto law = mech.LawFor(*plan, input);
    if (!law.ok()) return law.status();
    if (m == Mutation::kHalvedFlip) HalveSmallerSide(*law);
    return law;
  };
  auto r = AuditPrivacy(c);
  if (!r.ok()) return r.status();
  return std::vector<AuditReport>{*r};
}

absl::StatusOr<std::vector<AuditReport>> RunNoiseAudit(const AuditSetup& s,
                                                       DpRpVariant variant) {
  DpRpConfig cfg;
  cfg.variant = variant;
  cfg.budget.epsilon = s.epsilon;
  cfg.budget.delta = variant == DpRpVariant::kRpL ? 0 : s.delta;
  cfg.budget.beta = s.beta;
  switch (variant) {
    case DpRpVariant::kRawGOpt:
      cfg.spec.p = s.p;
      break;
    case DpRpVariant::kRpGOptB:
      cfg.spec = ProjectionSpec::Rademacher(s.p, s.k, s.seed);
      break;
    case DpRpVariant::kOporp:
      cfg.spec = ProjectionSpec::Oporp(s.p, s.k, s.seed);
      break;
    default: {
      auto spec = DenseSpec(s, "gaussian");
      if (!spec.ok()) return spec.status();
      cfg.spec = *spec;
    }
  }
  auto mech = DpRpMechanism::Create(cfg);
  if (!mech.ok()) return mech.status();
  NoiseAuditCase c;
  c.mechanism = s.mechanism;
  c.bases = s.bases.empty() ? DefaultBases(s.p, s.seed) : s.bases;
  c.beta = s.beta;
  c.grid_points = s.grid_points;
  c.laplace = variant == DpRpVariant::kRpL;
  c.scale = mech->calibration().noise.scale;
  if (s.mutation == Mutation::kHalvedSigma) c.scale /= 2;
  c.epsilon = cfg.budget.epsilon;
  c.delta = cfg.budget.delta;
  if (mech->projection() == nullptr) {
    c.shift = [](std::span<const double> d) {
      return std::vector<double>(d.begin(), d.end());
    };
  } else {
    const Eigen::MatrixXd a = mech->projection()->EffectiveMatrix().transpose();
    c.shift = [a](std::span<const double> d) {
      Eigen::VectorXd s =
          a * Eigen::Map<const Eigen::VectorXd>(d.data(), d.size());
      return std::vector<double>(s.data(), s.data() + s.size());
    };
  }
  auto r = AuditNoiseMechanism(c);
  if (!r.ok()) return r.status();
  return std::vector<AuditReport>{*r};
}

}  // namespace

std::vector<Neighbour> NeighbourGrid(std::span<const double> u, double beta,
                                     int points, std::optional<double> bound) {
  std::vector<Neighbour> out;
  for (size_t i = 0; i < u.size(); ++i) {
    for (int m = 0; m < points; ++m) {
      double shift = m == points - 1 ? beta
                                     : -beta + 2.0 * beta * m / (points - 1);
      if (shift == 0) continue;
      Neighbour n;
      n.coordinate = static_cast<int>(i);
      n.shift = shift;
      n.u.assign(u.begin(), u.end());
      n.u[i] += shift;
      if (bound && std::abs(n.u[i]) > *bound) continue;
      out.push_back(std::move(n));
    }
  }
  return out;
}

std::string AuditScopeName(AuditScope scope) {
  switch (scope) {
    case AuditScope::kPerBit:
      return "per_bit";
    case AuditScope::kComposed:
      return "composed";
    case AuditScope::kIdp:
      return "idp";
  }
  return "unknown";
}

std::string AuditReport::Summary() const {
  return absl::StrFormat(
      "%s %s %s eps=%.6g delta=%.3g worst=%.12g margin=%.3g neighbours=%d "
      "max_changed_bits=%d",
      pass ? "PASS" : "FAIL", mechanism, AuditScopeName(scope),
      claimed_epsilon, claimed_delta, worst, margin, neighbours,
      max_changed_bits);
}

absl::StatusOr<double> HockeyStick(const BitLaw& p, const BitLaw& q,
                                   double eps) {
  if (p.size() != q.size()) {
    return absl::InvalidArgumentError("laws differ in length");
  }
  std::vector<size_t> diff;
  for (size_t j = 0; j < p.size(); ++j) {
    if (p.plus[j] != q.plus[j] || p.minus[j] != q.minus[j]) diff.push_back(j);
  }
  if (diff.size() > kMaxEnumeratedBits) {
    return absl::InvalidArgumentError(absl::StrCat(
        diff.size(), " differing bits exceed the enumeration limit of ",
        kMaxEnumeratedBits));
  }
  const double scale = std::exp(eps);
  double total = 0;
  const uint64_t outputs = uint64_t{1} << diff.size();
  for (uint64_t o = 0; o < outputs; ++o) {
    double a = 1, b = 1;
    for (size_t i = 0; i < diff.size(); ++i) {
      const bool plus = (o >> i) & 1;
      a *= plus ? p.plus[diff[i]] : p.minus[diff[i]];
      b *= plus ? q.plus[diff[i]] : q.minus[diff[i]];
    }
    total += std::max(0.0, a - scale * b);
  }
  return total;
}

absl::StatusOr<AuditReport> AuditPrivacy(const AuditCase& c) {
  if (!c.law) return absl::InvalidArgumentError("audit case has no law");
  if (c.bases.empty()) return absl::InvalidArgumentError("no base vectors");
  if (c.grid_points < 2) {
    return absl::InvalidArgumentError("grid needs at least 2 points");
  }
  const bool approximate = c.scope != AuditScope::kPerBit && c.delta > 0;
  Worst w;
  int neighbours = 0, changed = 0;
  for (size_t b = 0; b < c.bases.size(); ++b) {
    const auto& base = c.bases[b];
    auto ref = c.law(base, base);
    if (!ref.ok()) return ref.status();
    for (const auto& n : NeighbourGrid(base, c.beta, c.grid_points, c.bound)) {
      auto nb = c.law(base, n.u);
      if (!nb.ok()) return nb.status();
      ++neighbours;
      int differing = 0;
      for (size_t j = 0; j < ref->size(); ++j) {
        differing += ref->plus[j] != nb->plus[j] || ref->minus[j] != nb->minus[j];
      }
      changed = std::max(changed, differing);
      const int bi = static_cast<int>(b);
      if (c.scope == AuditScope::kPerBit) {
        for (size_t j = 0; j < ref->size(); ++j) {
          const double v = std::max(
              {std::abs(LogRatio(ref->plus[j], nb->plus[j])),
               std::abs(LogRatio(ref->minus[j], nb->minus[j]))});
          w.Offer(v, bi, n, static_cast<int>(j));
        }
      } else if (!approximate) {
        w.Offer(std::max(WorstOutputLogRatio(*ref, *nb),
                         WorstOutputLogRatio(*nb, *ref)),
                bi, n, -1);
      } else {
        auto fwd = HockeyStick(*ref, *nb, c.epsilon);
        if (!fwd.ok()) return fwd.status();
        auto bwd = HockeyStick(*nb, *ref, c.epsilon);
        if (!bwd.ok()) return bwd.status();
        w.Offer(std::max(*fwd, *bwd), bi, n, -1);
      }
    }
  }
  return Finish(c.mechanism, c.scope, c.epsilon, c.delta,
                approximate ? c.delta : c.epsilon, c.tolerance, w, neighbours,
                changed);
}

absl::StatusOr<AuditReport> AuditNoiseMechanism(const NoiseAuditCase& c) {
  if (!c.shift) return absl::InvalidArgumentError("noise audit has no shift");
  if (!(c.scale > 0)) return absl::InvalidArgumentError("noise scale must be > 0");
  if (c.bases.empty()) return absl::InvalidArgumentError("no base vectors");
  Worst w;
  int neighbours = 0;
  QuadratureOptions q;
  q.tolerance = 1e-15;
  for (size_t b = 0; b < c.bases.size(); ++b) {
    const auto& base = c.bases[b];
    for (const auto& n : NeighbourGrid(base, c.beta, c.grid_points)) {
      std::vector<double> d(base.size());
      for (size_t i = 0; i < d.size(); ++i) d[i] = n.u[i] - base[i];
      const std::vector<double> s = c.shift(d);
      ++neighbours;
      double value = 0;
      if (c.laplace) {
        // Per coordinate, |y - x| - |y - x'| peaks at |x - x'| once y lies
        // beyond both centres; evaluate there.
        for (double sj : s) {
          const double y = std::max(0.0, sj) + c.scale;
          value += (std::abs(y - sj) - std::abs(y)) / c.scale;
          value = std::max(value, 0.0);
        }
        double l1 = 0;
        for (double sj : s) l1 += std::abs(sj);
        value = std::max(value, l1 / c.scale);
      } else {
        double norm = 0;
        for (double sj : s) norm += sj * sj;
        const double a = std::sqrt(norm) / c.scale;
        if (a > 0) {
          // Output coordinate along the shift, in units of sigma. The
          // integrand is positive exactly below z*.
          const double z_star = a / 2 - c.epsilon / a;
          const double scale = std::exp(c.epsilon);
          auto f = [&](double z) {
            return std::max(0.0, NormalPdf(z) - scale * NormalPdf(z - a));
          };
          auto r = IntegrateAdaptive(f, z_star - 40, z_star, q);
          if (!r.ok()) return r.status();
          value = r->value;
        }
      }
      w.Offer(value, static_cast<int>(b), n, -1);
    }
  }
  const double claim = c.laplace ? c.epsilon : c.delta;
  return Finish(c.mechanism, AuditScope::kComposed, c.epsilon,
                c.laplace ? 0 : c.delta, claim, c.tolerance, w, neighbours, 0);
}

std::string MutationName(Mutation m) {
  switch (m) {
    case Mutation::kNone:
      return "none";
    case Mutation::kHalvedFlip:
      return "halved_flip";
    case Mutation::kDroppedCoin:
      return "dropped_coin";
    case Mutation::kHalvedSigma:
      return "halved_sigma";
  }
  return "unknown";
}

absl::StatusOr<Mutation> ParseMutation(std::string_view name) {
  for (Mutation m : {Mutation::kNone, Mutation::kHalvedFlip,
                     Mutation::kDroppedCoin, Mutation::kHalvedSigma}) {
    if (name == MutationName(m)) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mutation '", std::string(name),
      "'; expected one of none, halved_flip, dropped_coin, halved_sigma"));
}

BitLaw MutatedLaw(const FlipPlan& plan, Mutation m) {
  BitLaw law = plan.Law();
  for (size_t j = 0; j < plan.size(); ++j) {
    if (plan.coin[j]) {
      if (m == Mutation::kDroppedCoin) {
        law.plus[j] = plan.base_signs[j] > 0 ? 1 : 0;
        law.minus[j] = 1 - law.plus[j];
      }
      continue;
    }
    if (m == Mutation::kHalvedFlip && std::isfinite(plan.eps_prime[j])) {
      const double flip = plan.FlipProbability(j) / 2;
      law.plus[j] = plan.base_signs[j] > 0 ? 1 - flip : flip;
      law.minus[j] = plan.base_signs[j] > 0 ? flip : 1 - flip;
    }
  }
  return law;
}

absl::StatusOr<std::vector<AuditReport>> RunAudit(const AuditSetup& s) {
  if (s.p < 1 || s.k < 1) return absl::InvalidArgumentError("p, k must be >= 1");
  if (s.grid_points < 2) {
    return absl::InvalidArgumentError("grid needs at least 2 points");
  }
  for (const auto& b : s.bases) {
    if (static_cast<int>(b.size()) != s.p) {
      return absl::InvalidArgumentError("base vector length differs from p");
    }
  }
  const std::string& m = s.mechanism;
  if (m == "signrp_rr" || m == "signrp_rr_smooth" || m == "signoporp_rr" ||
      m == "signoporp_rr_smooth") {
    return RunSignAudit(s);
  }
  if (m == "idp_signrp_rr" || m == "idp_signrp_g") return RunIdpAudit(s);
  if (auto v = ParseDpRpVariant(m); v.ok()) return RunNoiseAudit(s, *v);
  return absl::InvalidArgumentError(absl::StrCat(
      "unsupported mechanism '", m,
      "'; expected one of signrp_rr, signrp_rr_smooth, signoporp_rr, "
      "signoporp_rr_smooth, idp_signrp_rr, idp_signrp_g, raw_g_opt, rp_g, "
      "rp_g_opt, rp_l, rp_g_opt_b, oporp"));
}

}  // namespace dprp
