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

#include "dprp/retrieval.h"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <thread>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dprp/dp_rp.h"
#include "dprp/dp_sign.h"
#include "dprp/estimators.h"
#include "dprp/idp_sign.h"
#include "dprp/projections.h"
#include "dprp/rng.h"

namespace dprp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

bool IsBaseline(const std::string& name) {
  return name == "rp" || name == "signrp";
}

bool IsSignMechanism(const std::string& name) {
  return name == "signrp" || name.rfind("signrp_", 0) == 0 ||
         name.rfind("signoporp_", 0) == 0 || name.rfind("idp_", 0) == 0;
}

std::string DefaultProjection(const std::string& name) {
  if (name == "rp_g_opt_b" || name.rfind("idp_", 0) == 0) return "rademacher";
  if (name == "oporp" || name.rfind("signoporp_", 0) == 0) return "oporp";
  if (name == "raw_g_opt") return "";
  return "gaussian";
}

std::string ProjectionOf(const BenchMechanism& m) {
  return m.projection.empty() ? DefaultProjection(m.name) : m.projection;
}

const std::vector<std::string>& KnownMechanisms() {
  static const auto* names = new std::vector<std::string>{
      "rp",          "signrp",           "raw_g_opt",    "rp_g",
      "rp_g_opt",    "rp_l",             "rp_g_opt_b",   "oporp",
      "signrp_rr",   "signrp_rr_smooth", "signoporp_rr", "signoporp_rr_smooth",
      "idp_signrp_g", "idp_signrp_rr"};
  return *names;
}

namespace {

absl::StatusOr<ProjectionSpec> SpecFor(const std::string& kind, long long p,
                                       int k, uint64_t seed) {
  auto parsed = ParseProjectionKind(kind);
  if (!parsed.ok()) return parsed.status();
  ProjectionSpec spec{*parsed, p, k, 1.0, seed};
  return spec;
}

// Projection seed shared by every mechanism using `kind` within one run seed.
uint64_t ProjectionSeed(uint64_t run_seed, const std::string& kind) {
  RngStream s = RngStream(run_seed, kProjectionStream).Split(kind);
  return s();
}

struct Sketches {
  bool sign = false;
  Eigen::MatrixXd real;
  std::vector<std::vector<uint64_t>> packed;
};

}  // namespace

absl::StatusOr<Privatizer> MakePrivatizer(const BenchMechanism& m, double eps,
                                          double beta, double delta,
                                          long long p, uint64_t run_seed) {
  const std::string kind = ProjectionOf(m);
  PrivacyBudget budget;
  budget.epsilon = eps;
  budget.beta = beta;
  std::optional<ProjectionOperator> op;
  if (!kind.empty() && kind != "oporp") {
    auto spec = SpecFor(kind, p, m.k, ProjectionSeed(run_seed, kind));
    if (!spec.ok()) return spec.status();
    auto materialized = ProjectionOperator::Materialize(*spec);
    if (!materialized.ok()) return materialized.status();
    op = *std::move(materialized);
  }
  const std::string& name = m.name;
  if (name == "rp" || name == "signrp") {
    const bool sign = name == "signrp";
    return Privatizer([op = *op, sign](const DataVector& u, RngStream&)
                          -> absl::StatusOr<Sketch> {
      auto sk = ProjectVector(op, u);
      if (!sk.ok() || !sign) return sk;
      return TakeSigns(*sk);
    });
  }
  if (auto v = ParseDpRpVariant(name); v.ok()) {
    DpRpConfig dc;
    dc.variant = *v;
    budget.delta = *v == DpRpVariant::kRpL ? 0 : delta;
    dc.budget = budget;
    dc.mode = m.mode;
    absl::StatusOr<DpRpMechanism> mech = absl::InternalError("unset");
    if (*v == DpRpVariant::kRawGOpt) {
      dc.spec.p = p;
      mech = DpRpMechanism::Create(dc);
    } else if (*v == DpRpVariant::kOporp) {
      dc.spec = ProjectionSpec::Oporp(p, m.k, ProjectionSeed(run_seed, kind));
      mech = DpRpMechanism::Create(dc);
    } else {
      dc.spec = op->spec();
      mech = DpRpMechanism::Create(dc, *op);
    }
    if (!mech.ok()) return mech.status();
    return Privatizer([mech = *std::move(mech)](const DataVector& u,
                                                RngStream& rng) {
      return mech.Privatize(u, rng);
    });
  }
  if (name == "signrp_rr" || name == "signrp_rr_smooth") {
    const bool smooth = name == "signrp_rr_smooth";
    if (!smooth && m.m >= beta) budget.delta = delta;
    auto mech = SignRpMechanism::Create(
        *op, budget, smooth ? SignRpVariant::kRrSmooth : SignRpVariant::kRr,
        m.m);
    if (!mech.ok()) return mech.status();
    return Privatizer([mech = *std::move(mech)](const DataVector& u,
                                                RngStream& rng) {
      return mech.Privatize(u, rng);
    });
  }
  if (name == "signoporp_rr" || name == "signoporp_rr_smooth") {
    budget.repetitions = m.t;
    auto mech = SignOporpMechanism::Create(
        ProjectionSpec::Oporp(p, m.k, ProjectionSeed(run_seed, kind)), budget,
        name == "signoporp_rr" ? SignOporpVariant::kRr
                               : SignOporpVariant::kRrSmooth);
    if (!mech.ok()) return mech.status();
    return Privatizer([mech = *std::move(mech)](const DataVector& u,
                                                RngStream& rng) {
      return mech.Privatize(u, rng);
    });
  }
  if (name == "idp_signrp_g" || name == "idp_signrp_rr") {
    budget.delta = delta;
    auto mech = IdpSignMechanism::Create(
        *op, budget,
        name == "idp_signrp_g" ? IdpVariant::kGaussian : IdpVariant::kRr,
        /*allow_general_dense=*/true);
    if (!mech.ok()) return mech.status();
    return Privatizer([mech = *std::move(mech)](const DataVector& u,
                                                RngStream& rng) {
      return mech.Privatize(u, rng);
    });
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown benchmark mechanism '", name, "'"));
}

namespace {

absl::StatusOr<Sketches> SketchRows(const Privatizer& privatize,
                                    const Dataset& d, bool sign,
                                    const RngStream& stream) {
  Sketches out;
  out.sign = sign;
  for (size_t i = 0; i < d.size(); ++i) {
    auto u = d.Row(i);
    if (!u.ok()) return u.status();
    RngStream rng = stream.Split(static_cast<uint64_t>(i));
    auto sk = privatize(*u, rng);
    if (!sk.ok()) return sk.status();
    if (sign) {
      out.packed.push_back(PackWords(sk->signs));
    } else {
      if (out.real.size() == 0) {
        out.real.resize(static_cast<Eigen::Index>(d.size()),
                        static_cast<Eigen::Index>(sk->values.size()));
      }
      out.real.row(static_cast<Eigen::Index>(i)) =
          Eigen::Map<const Eigen::RowVectorXd>(sk->values.data(),
                                              sk->values.size());
    }
  }
  return out;
}

struct Cell {
  size_t mechanism;
  double epsilon;
  uint64_t seed;
};

// Per-cell means over queries, keyed like the output rows.
struct CellMetrics {
  std::vector<double> precision;  // indexed like r_grid
  std::vector<double> recall;
  double knn_accuracy = 0;
};

absl::StatusOr<CellMetrics> RunCell(const SyntheticData& data,
                                    const GoldStandard& gold,
                                    const RetrievalConfig& cfg,
                                    const Cell& cell) {
  const BenchMechanism& m = cfg.mechanisms[cell.mechanism];
  auto privatize = MakePrivatizer(m, cell.epsilon, cfg.beta, cfg.delta,
                                  data.database.dim(), cell.seed);
  if (!privatize.ok()) return privatize.status();
  const bool sign = IsSignMechanism(m.name);
  const RngStream noise = RngStream(cell.seed, kNoiseStream)
                              .Split(m.name)
                              .Split(std::bit_cast<uint64_t>(cell.epsilon));
  auto db = SketchRows(*privatize, data.database, sign, noise.Split("database"));
  if (!db.ok()) return db.status();
  auto qs = SketchRows(*privatize, data.queries, sign, noise.Split("queries"));
  if (!qs.ok()) return qs.status();
  int r_max = cfg.knn;
  for (int r : cfg.r_grid) r_max = std::max(r_max, r);
  r_max = std::min<int>(r_max, static_cast<int>(data.database.size()));
  const auto ranked = sign ? RankByHamming(qs->packed, db->packed, r_max)
                           : RankByCosine(qs->real, db->real, r_max);
  CellMetrics out;
  out.precision.assign(cfg.r_grid.size(), 0);
  out.recall.assign(cfg.r_grid.size(), 0);
  const double nq = static_cast<double>(ranked.size());
  int correct = 0;
  for (size_t q = 0; q < ranked.size(); ++q) {
    for (size_t i = 0; i < cfg.r_grid.size(); ++i) {
      auto pr = PrecisionRecallAt(ranked[q], gold.neighbours[q], cfg.r_grid[i]);
      if (!pr.ok()) return pr.status();
      out.precision[i] += pr->precision / nq;
      out.recall[i] += pr->recall / nq;
    }
    if (cfg.knn > 0) {
      correct += KnnVote(ranked[q], data.database_labels, cfg.knn) ==
                 data.query_labels[q];
    }
  }
  out.knn_accuracy = correct / nq;
  return out;
}

}  // namespace

absl::StatusOr<GoldStandard> BuildGoldStandard(const Dataset& database,
                                               const Dataset& queries, int g) {
  if (g < 1) return absl::InvalidArgumentError("gold size G must be >= 1");
  for (const Dataset* d : {&database, &queries}) {
    if (auto s = ValidateDataset(*d).ToStatus(); !s.ok()) return s;
  }
  if (database.dim() != queries.dim()) {
    return absl::InvalidArgumentError("database and queries differ in dimension");
  }
  auto normalized = [](const Dataset& d) {
    Eigen::MatrixXd m(d.size(), d.dim());
    for (size_t i = 0; i < d.size(); ++i) {
      Eigen::Map<const Eigen::RowVectorXd> row(d.rows[i].data(), d.dim());
      m.row(static_cast<Eigen::Index>(i)) = row / row.norm();
    }
    return m;
  };
  GoldStandard out;
  out.g = std::min<int>(g, static_cast<int>(database.size()));
  out.neighbours = RankByCosine(normalized(queries), normalized(database), out.g);
  return out;
}

absl::StatusOr<PrecisionRecall> PrecisionRecallAt(
    std::span<const int> retrieved, std::span<const int> gold, int r) {
  if (r < 1) return absl::InvalidArgumentError("R must be >= 1");
  if (gold.empty()) return absl::InvalidArgumentError("empty gold set");
  std::vector<int> g(gold.begin(), gold.end());
  std::sort(g.begin(), g.end());
  const size_t n = std::min<size_t>(r, retrieved.size());
  int hits = 0;
  for (size_t i = 0; i < n; ++i) {
    hits += std::binary_search(g.begin(), g.end(), retrieved[i]);
  }
  return PrecisionRecall{static_cast<double>(hits) / r,
                         static_cast<double>(hits) / g.size()};
}

std::vector<int> TopIndices(std::span<const double> scores, int r,
                            bool ascending) {
  std::vector<int> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  const size_t n = std::min<size_t>(std::max(r, 0), idx.size());
  auto better = [&](int a, int b) {
    if (scores[a] != scores[b]) {
      return ascending ? scores[a] < scores[b] : scores[a] > scores[b];
    }
    return a < b;
  };
  std::partial_sort(idx.begin(), idx.begin() + n, idx.end(), better);
  idx.resize(n);
  return idx;
}

std::vector<std::vector<int>> RankByCosine(const Eigen::MatrixXd& queries,
                                           const Eigen::MatrixXd& database,
                                           int r) {
  const Eigen::VectorXd qn = queries.rowwise().norm();
  const Eigen::VectorXd dn = database.rowwise().norm();
  const Eigen::MatrixXd dots = queries * database.transpose();
  std::vector<std::vector<int>> out(queries.rows());
  std::vector<double> scores(database.rows());
  for (Eigen::Index q = 0; q < queries.rows(); ++q) {
    for (Eigen::Index i = 0; i < database.rows(); ++i) {
      const double denom = qn[q] * dn[i];
      scores[i] = denom > 0 ? dots(q, i) / denom : 0.0;
    }
    out[q] = TopIndices(scores, r);
  }
  return out;
}

std::vector<std::vector<int>> RankByHamming(
    const std::vector<std::vector<uint64_t>>& queries,
    const std::vector<std::vector<uint64_t>>& database, int r) {
  std::vector<std::vector<int>> out(queries.size());
  std::vector<double> scores(database.size());
  for (size_t q = 0; q < queries.size(); ++q) {
    for (size_t i = 0; i < database.size(); ++i) {
      scores[i] = HammingDistancePacked(queries[q], database[i]);
    }
    out[q] = TopIndices(scores, r, /*ascending=*/true);
  }
  return out;
}

int KnnVote(std::span<const int> ranked, std::span<const int> labels, int k) {
  std::map<int, std::pair<int, int>> votes;  // label -> (count, -first rank)
  const size_t n = std::min<size_t>(k, ranked.size());
  for (size_t i = 0; i < n; ++i) {
    auto [it, inserted] =
        votes.try_emplace(labels[ranked[i]], 0, -static_cast<int>(i));
    ++it->second.first;
  }
  int best = -1;
  std::pair<int, int> best_score{-1, 0};
  for (const auto& [label, score] : votes) {
    if (score > best_score) {
      best_score = score;
      best = label;
    }
  }
  return best;
}

absl::Status ValidateBenchMechanism(const BenchMechanism& mech) {
  const auto& known = KnownMechanisms();
  if (std::find(known.begin(), known.end(), mech.name) == known.end()) {
    std::string list;
    for (const auto& n : known) absl::StrAppend(&list, list.empty() ? "" : ", ", n);
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown mechanism '", mech.name, "'; expected one of ", list));
  }
  if (mech.k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (mech.t < 1 || mech.k % mech.t != 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("repetitions t=", mech.t, " must divide k=", mech.k));
  }
  if (!IsBaseline(mech.name)) {
    if (mech.epsilons.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("mechanism ", mech.name, " needs at least one epsilon"));
    }
    for (double e : mech.epsilons) {
      if (!(e > 0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("epsilon must be positive, got ", e));
      }
    }
  }
  if (!mech.projection.empty()) {
    if (auto k = ParseProjectionKind(mech.projection); !k.ok()) return k.status();
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<MetricRow>> RunRetrieval(
    const SyntheticData& data, const RetrievalConfig& cfg) {
  if (cfg.seeds.empty()) return absl::InvalidArgumentError("no seeds given");
  if (cfg.r_grid.empty()) return absl::InvalidArgumentError("empty R grid");
  for (int r : cfg.r_grid) {
    if (r < 1) return absl::InvalidArgumentError("R must be >= 1");
  }
  if (cfg.knn < 0) return absl::InvalidArgumentError("knn must be >= 0");
  for (const auto& m : cfg.mechanisms) {
    if (auto s = ValidateBenchMechanism(m); !s.ok()) return s;
  }
  auto gold = BuildGoldStandard(data.database, data.queries, cfg.gold);
  if (!gold.ok()) return gold.status();

  std::vector<Cell> cells;
  for (size_t i = 0; i < cfg.mechanisms.size(); ++i) {
    const auto& m = cfg.mechanisms[i];
    const std::vector<double> eps =
        IsBaseline(m.name) ? std::vector<double>{kInf} : m.epsilons;
    for (double e : eps) {
      for (uint64_t s : cfg.seeds) cells.push_back({i, e, s});
    }
  }
  std::vector<std::optional<CellMetrics>> results(cells.size());
  std::atomic<size_t> next{0};
  std::mutex mu;
  absl::Status failure;
  auto worker = [&] {
    for (size_t c = next++; c < cells.size(); c = next++) {
      auto r = RunCell(data, *gold, cfg, cells[c]);
      std::lock_guard<std::mutex> lock(mu);
      if (!r.ok()) {
        if (failure.ok()) failure = r.status();
        continue;
      }
      results[c] = *std::move(r);
    }
  };
  const int jobs = std::max(1, cfg.jobs);
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (!failure.ok()) return failure;

  // Aggregate over seeds; cells of one (mechanism, epsilon) are contiguous.
  std::vector<MetricRow> rows;
  const size_t n_seeds = cfg.seeds.size();
  auto add = [&](const Cell& cell, int r, const std::string& metric,
                 const std::function<double(const CellMetrics&)>& get,
                 size_t first) {
    double s = 0, s2 = 0;
    for (size_t j = 0; j < n_seeds; ++j) {
      const double v = get(*results[first + j]);
      s += v;
      s2 += v * v;
    }
    const double mean = s / n_seeds;
    const double var =
        n_seeds > 1 ? std::max(0.0, (s2 - n_seeds * mean * mean) / (n_seeds - 1))
                    : 0.0;
    const auto& m = cfg.mechanisms[cell.mechanism];
    rows.push_back({m.name, cell.epsilon, m.k, r, metric, mean,
                    std::sqrt(var / n_seeds), static_cast<int>(n_seeds)});
  };
  for (size_t first = 0; first < cells.size(); first += n_seeds) {
    const Cell& cell = cells[first];
    for (size_t i = 0; i < cfg.r_grid.size(); ++i) {
      add(cell, cfg.r_grid[i], "precision",
          [i](const CellMetrics& m) { return m.precision[i]; }, first);
      add(cell, cfg.r_grid[i], "recall",
          [i](const CellMetrics& m) { return m.recall[i]; }, first);
    }
    if (cfg.knn > 0) {
      add(cell, cfg.knn, "knn_accuracy",
          [](const CellMetrics& m) { return m.knn_accuracy; }, first);
    }
  }
  return rows;
}

std::string MetricsCsv(const std::vector<MetricRow>& rows) {
  std::string out = "mechanism,epsilon,k,R,metric,mean,std_error,seeds\n";
  for (const auto& r : rows) {
    absl::StrAppend(&out, r.mechanism, ",",
                    std::isinf(r.epsilon) ? "inf" : absl::StrFormat("%g", r.epsilon),
                    ",", r.k, ",", r.r, ",", r.metric, ",",
                    absl::StrFormat("%.6f,%.6f", r.mean, r.std_error), ",",
                    r.seeds, "\n");
  }
  return out;
}

const MetricRow* FindMetric(const std::vector<MetricRow>& rows,
                            const std::string& mechanism, double epsilon,
                            int r, const std::string& metric) {
  for (const auto& row : rows) {
    if (row.mechanism == mechanism && row.r == r && row.metric == metric &&
        (IsBaseline(mechanism) || row.epsilon == epsilon)) {
      return &row;
    }
  }
  return nullptr;
}

}  // namespace dprp
