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

// Retrieval benchmark: exact-cosine gold standard, precision/recall@R and a
// k-NN classification proxy over private sketches.

#ifndef DPRP_RETRIEVAL_H_
#define DPRP_RETRIEVAL_H_

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/statusor.h"
#include "dprp/core.h"
#include "dprp/dp_rp.h"
#include "dprp/projections.h"
#include "dprp/rng.h"
#include "dprp/synthetic.h"

namespace dprp {

struct GoldStandard {
  int g = 0;
  // Per query, database row indices ranked by decreasing cosine.
  std::vector<std::vector<int>> neighbours;
};

// Top-g database rows per query by exact cosine, ties broken by row index.
// g larger than the database is clamped.
absl::StatusOr<GoldStandard> BuildGoldStandard(const Dataset& database,
                                               const Dataset& queries, int g);

struct PrecisionRecall {
  double precision = 0;
  double recall = 0;
};

// precision = |top-r of retrieved ∩ gold| / r, recall = same / |gold|.
absl::StatusOr<PrecisionRecall> PrecisionRecallAt(
    std::span<const int> retrieved, std::span<const int> gold, int r);

// Indices of the r best scores (largest first unless `ascending`), ties
// broken by index.
std::vector<int> TopIndices(std::span<const double> scores, int r,
                            bool ascending = false);

// Rows of `queries` and `database` are sketches; ranks by cosine.
std::vector<std::vector<int>> RankByCosine(const Eigen::MatrixXd& queries,
                                           const Eigen::MatrixXd& database,
                                           int r);
// Packed sign sketches; ranks by increasing Hamming distance.
std::vector<std::vector<int>> RankByHamming(
    const std::vector<std::vector<uint64_t>>& queries,
    const std::vector<std::vector<uint64_t>>& database, int r);

// Majority label among the first `k` ranked rows; ties go to the label of
// the best-ranked row among the tied labels.
int KnnVote(std::span<const int> ranked, std::span<const int> labels, int k);

// One mechanism of the benchmark. Names: the private mechanisms (raw_g_opt,
// rp_g, rp_g_opt, rp_l, rp_g_opt_b, oporp, signrp_rr, signrp_rr_smooth,
// signoporp_rr, signoporp_rr_smooth, idp_signrp_g, idp_signrp_rr) and the
// non-private baselines rp and signrp.
struct BenchMechanism {
  std::string name;
  // Ignored by the baselines, which run once with epsilon = +inf.
  std::vector<double> epsilons;
  int k = 256;
  // Repetitions for the SignOPORP mechanisms.
  int t = 1;
  // Norm lower bound for signrp_rr.
  double m = 0;
  // Projection kind; empty selects the mechanism's default.
  std::string projection;
  // Sensitivity mode for the noise-addition variants.
  SensitivityMode mode = SensitivityMode::kDefault;
};

// Every accepted mechanism name, baselines first.
const std::vector<std::string>& KnownMechanisms();
// rp and signrp: non-private, run once per seed.
bool IsBaseline(const std::string& name);
bool IsSignMechanism(const std::string& name);
// Projection kind a mechanism uses; empty for raw_g_opt.
std::string ProjectionOf(const BenchMechanism& m);

using Privatizer =
    std::function<absl::StatusOr<Sketch>(const DataVector&, RngStream&)>;

// Builds the mechanism `m` at budget eps for dimension p. The projection seed
// is derived from run_seed and the projection kind, so mechanisms sharing a
// kind share the matrix within a run.
absl::StatusOr<Privatizer> MakePrivatizer(const BenchMechanism& m, double eps,
                                          double beta, double delta,
                                          long long p, uint64_t run_seed);

absl::Status ValidateBenchMechanism(const BenchMechanism& mech);

struct RetrievalConfig {
  SyntheticSpec data;
  std::vector<BenchMechanism> mechanisms;
  std::vector<int> r_grid = {10, 50};
  int gold = 50;
  // Neighbours in the k-NN vote; 0 disables the classification metric.
  int knn = 5;
  std::vector<uint64_t> seeds = {1};
  double beta = 1.0;
  double delta = 1e-6;
  int jobs = 1;
};

struct MetricRow {
  std::string mechanism;
  double epsilon = std::numeric_limits<double>::infinity();
  int k = 0;
  // R for precision/recall, the vote size for knn_accuracy.
  int r = 0;
  // "precision", "recall" or "knn_accuracy".
  std::string metric;
  double mean = 0;
  // Standard error of the mean over seeds.
  double std_error = 0;
  int seeds = 0;
};

// Runs every (mechanism, epsilon, seed) cell and averages over seeds. Both
// queries and database rows are privatized; the projection of a seed is
// shared by all mechanisms using the same kind.
absl::StatusOr<std::vector<MetricRow>> RunRetrieval(const SyntheticData& data,
                                                    const RetrievalConfig& cfg);

std::string MetricsCsv(const std::vector<MetricRow>& rows);

// Row for (mechanism, epsilon, r, metric), or null. Baselines match any
// epsilon.
const MetricRow* FindMetric(const std::vector<MetricRow>& rows,
                            const std::string& mechanism, double epsilon,
                            int r, const std::string& metric);

}  // namespace dprp

#endif  // DPRP_RETRIEVAL_H_
