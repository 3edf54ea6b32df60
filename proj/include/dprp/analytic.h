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

// Closed-form and numerically evaluated quantities used to calibrate and
// analyse the mechanisms: concentration bounds, bivariate-normal conditional
// quantities, the sign-change probability P+, the N+ bound and estimator
// variances.

#ifndef DPRP_ANALYTIC_H_
#define DPRP_ANALYTIC_H_

#include <span>

#include "absl/status/statusor.h"

namespace dprp {

struct TailBoundResult {
  double threshold = 0;
  // Upper bound on the probability of reaching `threshold`, in [0, 1].
  double bound = 1;
};

// For Z a chi-square with n degrees of freedom:
// Pr(Z >= n + 2 sqrt(n t) + 2 t) <= exp(-t).
absl::StatusOr<TailBoundResult> ChiSquareTail(int n, double t);

// For Z a sum of n iid standard half-normals:
// Pr(Z >= sqrt(2 n^2 log 2 + 2 n t)) <= exp(-t).
absl::StatusOr<TailBoundResult> HalfNormalTail(int n, double t);

// For X ~ Binomial(n, p) with mean mu = n p:
// Pr(X >= (1 + eta) mu) <= exp(-eta^2 mu / (eta + 2)).
absl::StatusOr<TailBoundResult> BinomialTail(int n, double p, double eta);

// (X, Y) bivariate normal with correlation rho and r = sigma_x / sigma_y.
// Pr(|X| > |Y|).
absl::StatusOr<double> AbsExceedProb(double r, double rho);
// E[|X| given |X| > |Y|].
absl::StatusOr<double> ConditionalAbsExpectation(double r, double rho,
                                                 double sigma_x);
// Upper bound exp(-t^2 / (2 sigma_x^2)) on Pr(|X| > t given |X| > |Y|).
absl::StatusOr<double> ConditionalTailBound(double t, double sigma_x);

// Pr(r * max_{i<=p} |Z_i| >= |Z_0|) for iid standard normals, i.e.
// int_0^inf 2p [2 Phi(t) - 1]^{p-1} [2 Phi(r t) - 1] phi(t) dt, by adaptive
// quadrature on [0, sqrt(2 log p) + 10] with absolute tolerance 1e-8.
absl::StatusOr<double> PPlusGaussian(double r, long long p);

struct RademacherPPlus {
  double value = 0;
  // Set when p < 20, where the normal approximation is unreliable.
  bool small_p_warning = false;
};

// Normal approximation 2 Phi(r) - 1 to the Rademacher-projection analogue of
// PPlusGaussian. Does not depend on p beyond the warning flag.
absl::StatusOr<RademacherPPlus> PPlusRademacher(double r, long long p);

enum class NPlusFlavor { kGaussian, kRademacher };

struct NPlusResult {
  // Integer bound on the number of signs a single neighbour can change.
  int value = 0;
  // Per-projection sign-change probability bound used (F).
  double f = 0;
  // The raw bound exceeded k and was capped.
  bool capped = false;
  // beta > norm_u: the bound does not apply and `value` is the trivial k.
  bool beta_exceeds_norm = false;
};

// ceil(min{F k + (L + sqrt(L^2 + 8 F k L)) / 2, k}) with L = log(1/delta).
absl::StatusOr<NPlusResult> NPlusFromF(double f, double delta, int k);

// High-probability bound on the number of sign changes, with F from
// PPlusGaussian or PPlusRademacher at r = beta / norm_u. Fails with
// FailedPrecondition when beta > norm_u.
absl::StatusOr<NPlusResult> NPlusBound(double norm_u, double beta,
                                       double delta, int k, long long p,
                                       NPlusFlavor flavor);
// Same, but returns the trivial bound k (flagged) when beta > norm_u.
absl::StatusOr<NPlusResult> NPlusBoundOrCap(double norm_u, double beta,
                                            double delta, int k, long long p,
                                            NPlusFlavor flavor);

// theta (pi - theta) / k: variance of the sign-collision angle estimator.
absl::StatusOr<double> SignRpAngleVariance(double theta, int k);

// V_RR = theta (pi - theta) + 2 pi^2 e^e / (e^e - 1)^2
//        + 4 pi^2 e^{2e} / (e^e - 1)^4, with e = eps_prime.
absl::StatusOr<double> RrVarianceFactor(double theta, double eps_prime);
// V_RR / k: variance of the debiased angle estimator.
absl::StatusOr<double> RrAngleVariance(double theta, int k, double eps_prime);

enum class InnerProductKind {
  // Gaussian noise added to the raw vectors.
  kRaw,
  // Scaled Rademacher projection plus noise.
  kRp,
  // Scaled Gaussian projection plus noise.
  kRpGaussian,
  // OPORP with fixed-length bins plus noise.
  kOporp,
};

// Variance of sum_j (x_j + a_j)(y_j + b_j) with a, b iid N(0, sigma^2).
// For kOporp a dimension not divisible by k is zero-padded to the next
// multiple, and the (p - k) / (p - 1) factor uses the padded length.
absl::StatusOr<double> InnerProductVariance(InnerProductKind kind,
                                            std::span<const double> u,
                                            std::span<const double> v, int k,
                                            double sigma);

// (2 sigma^2 + p sigma^4) / (2 sigma^2 + k sigma^4 + 1/k).
absl::StatusOr<double> VarianceRatio(long long p, int k, double sigma);

// Order-of-magnitude optimal projection count epsilon theta (pi - theta) / F.
absl::StatusOr<double> OptimalKStar(double theta, double epsilon, double f);

}  // namespace dprp

#endif  // DPRP_ANALYTIC_H_
