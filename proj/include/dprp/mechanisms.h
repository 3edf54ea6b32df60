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

// Noise calibration: sensitivities of a projection, Gaussian and Laplace
// noise scales, and basic composition.

#ifndef DPRP_MECHANISMS_H_
#define DPRP_MECHANISMS_H_

#include <span>
#include <string>

#include "Eigen/Core"
#include "absl/status/statusor.h"

namespace dprp {

enum class SensitivityBasis {
  kExactFromMatrix,
  kClosedForm,
  kHighProbabilityBound,
};

std::string SensitivityBasisName(SensitivityBasis basis);

struct Sensitivity {
  double l1 = 0;
  double l2 = 0;
  SensitivityBasis basis = SensitivityBasis::kExactFromMatrix;
  // Failure probability spent on the bound; 0 unless kHighProbabilityBound.
  double delta_share = 0;
};

// Delta_q = (beta / sqrt(k)) * max_i ||W[i, :]||_q for the p x k matrix W,
// with k = W.cols(). Rademacher matrices give Delta_2 == beta exactly.
absl::StatusOr<Sensitivity> SensitivityFromMatrix(const Eigen::MatrixXd& w,
                                                  double beta);

// Bound on Delta_2 of a p x k iid N(0, 1) matrix that fails with probability
// at most delta_share:
// beta * sqrt(1 + 2 sqrt(log(p/d)/k) + 2 log(p/d)/k).
absl::StatusOr<double> SensitivityL2Bound(long long p, int k, double beta,
                                          double delta_share);
// Same for Delta_1: beta * sqrt(2 k log 2 + 2 log(p/d)).
absl::StatusOr<double> SensitivityL1Bound(long long p, int k, double beta,
                                          double delta_share);

// sigma = Delta_2 sqrt(2 (log(1/delta) + eps)) / eps. Requires delta < 1/2.
absl::StatusOr<double> ClassicGaussianSigma(double delta2, double eps,
                                            double delta);

// Exact privacy profile of the Gaussian mechanism with noise sigma and
// sensitivity delta2:
// Phi(D/(2s) - e s/D) - exp(e) Phi(-D/(2s) - e s/D).
// Strictly decreasing in sigma.
double GaussianPrivacyProfile(double sigma, double delta2, double eps);

// Smallest sigma with GaussianPrivacyProfile(sigma) <= delta, found by
// bisection on sigma / delta2. The returned value satisfies
// |profile - delta| < 1e-12 and profile <= delta.
absl::StatusOr<double> OptimalGaussianSigma(double delta2, double eps,
                                            double delta);

// Classic sigma evaluated at the Delta_2 bound, splitting delta evenly
// between the bound's failure probability and the mechanism.
absl::StatusOr<double> AnalyticRpGaussianSigma(long long p, int k, double beta,
                                               double eps, double delta);

// lambda = Delta_1 / eps.
absl::StatusOr<double> LaplaceLambda(double delta1, double eps);

enum class NoiseDistribution { kGaussian, kLaplace };

struct NoiseCalibration {
  NoiseDistribution distribution = NoiseDistribution::kGaussian;
  // sigma for Gaussian noise, lambda for Laplace noise.
  double scale = 0;
  double epsilon = 0;
  double delta = 0;
};

struct EpsDelta {
  double epsilon = 0;
  double delta = 0;
};

// Basic composition: (sum eps_i, sum delta_i).
EpsDelta Compose(std::span<const EpsDelta> budgets);

}  // namespace dprp

#endif  // DPRP_MECHANISMS_H_
