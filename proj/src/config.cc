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

#include "dprp/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"

namespace dprp {
namespace {

using nlohmann::json;

size_t EditDistance(std::string_view a, std::string_view b) {
  std::vector<size_t> row(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (size_t i = 1; i <= a.size(); ++i) {
    size_t diag = row[0];
    row[0] = i;
    for (size_t j = 1; j <= b.size(); ++j) {
      const size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1,
                         diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

absl::Status FieldError(const std::string& path, absl::string_view what) {
  return absl::InvalidArgumentError(absl::StrCat(path, ": ", what));
}

// Typed access to the members of one JSON object.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {}

  absl::Status CheckObject() const {
    if (!j_.is_object()) return FieldError(path_, "expected an object");
    return absl::OkStatus();
  }

  absl::Status RejectUnknown(const std::vector<std::string>& known) const {
    for (const auto& [key, value] : j_.items()) {
      if (std::find(known.begin(), known.end(), key) == known.end()) {
        return FieldError(Path(key),
                          absl::StrCat("unknown field; ",
                                       SuggestionList(key, known)));
      }
    }
    return absl::OkStatus();
  }

  bool Has(const std::string& key) const { return j_.contains(key); }
  std::string Path(const std::string& key) const {
    return absl::StrCat(path_, ".", key);
  }

  absl::Status Number(const std::string& key, double* out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_number()) return FieldError(Path(key), "expected a number");
    *out = v.get<double>();
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integer(const std::string& key, Int* out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_number_integer()) {
      return FieldError(Path(key), "expected an integer");
    }
    if constexpr (std::is_unsigned_v<Int>) {
      if (v.is_number_unsigned() || v.get<long long>() >= 0) {
        *out = v.get<Int>();
        return absl::OkStatus();
      }
      return FieldError(Path(key), "expected a non-negative integer");
    } else {
      *out = v.get<Int>();
      return absl::OkStatus();
    }
  }

  absl::Status String(const std::string& key, std::string* out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_string()) return FieldError(Path(key), "expected a string");
    *out = v.get<std::string>();
    return absl::OkStatus();
  }

  absl::Status Numbers(const std::string& key, std::vector<double>* out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_array()) return FieldError(Path(key), "expected an array");
    out->clear();
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        return FieldError(absl::StrCat(Path(key), "[", i, "]"),
                          "expected a number");
      }
      out->push_back(v[i].get<double>());
    }
    return absl::OkStatus();
  }

  template <typename Int>
  absl::Status Integers(const std::string& key, std::vector<Int>* out) const {
    if (!Has(key)) return absl::OkStatus();
    const json& v = j_.at(key);
    if (!v.is_array()) return FieldError(Path(key), "expected an array");
    out->clear();
    for (size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer() ||
          (std::is_unsigned_v<Int> && v[i].get<long long>() < 0 &&
           !v[i].is_number_unsigned())) {
        return FieldError(absl::StrCat(Path(key), "[", i, "]"),
                          "expected an integer");
      }
      out->push_back(v[i].get<Int>());
    }
    return absl::OkStatus();
  }

 private:
  const json& j_;
  std::string path_;
};

#define DPRP_RETURN_IF_ERROR(expr)       \
  do {                                   \
    if (absl::Status s_ = (expr); !s_.ok()) return s_; \
  } while (0)

absl::StatusOr<SyntheticSpec> ParseSynthetic(const json& j,
                                             const std::string& path,
                                             uint64_t default_seed) {
  Fields f(j, path);
  DPRP_RETURN_IF_ERROR(f.CheckObject());
  DPRP_RETURN_IF_ERROR(f.RejectUnknown(
      {"n_database", "n_queries", "p", "norm", "clusters", "spread", "seed"}));
  SyntheticSpec s;
  s.seed = default_seed;
  DPRP_RETURN_IF_ERROR(f.Integer("n_database", &s.n_database));
  DPRP_RETURN_IF_ERROR(f.Integer("n_queries", &s.n_queries));
  DPRP_RETURN_IF_ERROR(f.Integer("p", &s.p));
  DPRP_RETURN_IF_ERROR(f.Number("norm", &s.norm));
  DPRP_RETURN_IF_ERROR(f.Integer("clusters", &s.clusters));
  DPRP_RETURN_IF_ERROR(f.Number("spread", &s.spread));
  DPRP_RETURN_IF_ERROR(f.Integer("seed", &s.seed));
  if (auto st = s.Validate(); !st.ok()) return FieldError(path, st.message());
  return s;
}

}  // namespace

BenchMechanism MechanismConfig::ToBench() const {
  BenchMechanism b;
  b.name = variant;
  b.epsilons = {epsilon};
  b.k = k;
  b.t = t;
  b.m = m;
  b.projection = projection;
  b.mode = mode;
  return b;
}

std::string SensitivityModeName(SensitivityMode mode) {
  switch (mode) {
    case SensitivityMode::kDefault:
      return "default";
    case SensitivityMode::kExactFromMatrix:
      return "exact";
    case SensitivityMode::kAnalyticBound:
      return "analytic";
  }
  return "unknown";
}

absl::StatusOr<SensitivityMode> ParseSensitivityMode(std::string_view name) {
  for (auto m : {SensitivityMode::kDefault, SensitivityMode::kExactFromMatrix,
                 SensitivityMode::kAnalyticBound}) {
    if (name == SensitivityModeName(m)) return m;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sensitivity mode '", std::string(name), "'; ",
                   SuggestionList(name, {"default", "exact", "analytic"})));
}

std::string SuggestionList(std::string_view given,
                           const std::vector<std::string>& choices) {
  std::string best;
  size_t best_d = std::string::npos;
  for (const auto& c : choices) {
    const size_t d = EditDistance(given, c);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  std::string out;
  if (!best.empty() && best_d <= std::max<size_t>(2, given.size() / 3)) {
    out = absl::StrCat("did you mean '", best, "'? ");
  }
  return absl::StrCat(out, "expected one of ", absl::StrJoin(choices, ", "));
}

absl::StatusOr<json> ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  json j = json::parse(in, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": invalid JSON"));
  }
  return j;
}

absl::Status ValidateMechanismConfig(const MechanismConfig& c,
                                     const std::string& path) {
  const auto& known = KnownMechanisms();
  if (c.variant.empty()) return FieldError(path + ".variant", "required");
  if (std::find(known.begin(), known.end(), c.variant) == known.end()) {
    return FieldError(path + ".variant",
                      absl::StrCat("unknown variant '", c.variant, "'; ",
                                   SuggestionList(c.variant, known)));
  }
  if (!IsBaseline(c.variant) && (!(c.epsilon > 0) || !std::isfinite(c.epsilon))) {
    return FieldError(path + ".epsilon",
                      absl::StrCat("must be positive and finite, got ", c.epsilon));
  }
  if (!(c.delta >= 0 && c.delta < 1)) {
    return FieldError(path + ".delta",
                      absl::StrCat("must lie in [0, 1), got ", c.delta));
  }
  if (!(c.beta > 0) || !std::isfinite(c.beta)) {
    return FieldError(path + ".beta", absl::StrCat("must be positive, got ", c.beta));
  }
  if (c.k < 1) return FieldError(path + ".k", absl::StrCat("must be >= 1, got ", c.k));
  if (c.t < 1) return FieldError(path + ".t", absl::StrCat("must be >= 1, got ", c.t));
  if (!(c.m >= 0)) return FieldError(path + ".m", "must be >= 0");
  if (!c.projection.empty()) {
    if (auto k = ParseProjectionKind(c.projection); !k.ok()) {
      return FieldError(path + ".projection", k.status().message());
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<MechanismConfig> ParseMechanismConfig(const json& j,
                                                     const std::string& path) {
  Fields f(j, path);
  DPRP_RETURN_IF_ERROR(f.CheckObject());
  DPRP_RETURN_IF_ERROR(f.RejectUnknown({"variant", "epsilon", "delta", "beta",
                                        "k", "t", "m", "projection",
                                        "sensitivity_mode"}));
  MechanismConfig c;
  DPRP_RETURN_IF_ERROR(f.String("variant", &c.variant));
  DPRP_RETURN_IF_ERROR(f.Number("epsilon", &c.epsilon));
  DPRP_RETURN_IF_ERROR(f.Number("delta", &c.delta));
  DPRP_RETURN_IF_ERROR(f.Number("beta", &c.beta));
  DPRP_RETURN_IF_ERROR(f.Integer("k", &c.k));
  DPRP_RETURN_IF_ERROR(f.Integer("t", &c.t));
  DPRP_RETURN_IF_ERROR(f.Number("m", &c.m));
  DPRP_RETURN_IF_ERROR(f.String("projection", &c.projection));
  std::string mode = "default";
  DPRP_RETURN_IF_ERROR(f.String("sensitivity_mode", &mode));
  auto parsed = ParseSensitivityMode(mode);
  if (!parsed.ok()) {
    return FieldError(f.Path("sensitivity_mode"), parsed.status().message());
  }
  c.mode = *parsed;
  if (!f.Has("epsilon") && !IsBaseline(c.variant)) {
    return FieldError(f.Path("epsilon"), "required");
  }
  DPRP_RETURN_IF_ERROR(ValidateMechanismConfig(c, path));
  return c;
}

absl::StatusOr<MechanismConfig> LoadMechanismConfig(const std::string& path) {
  auto j = ReadJsonFile(path);
  if (!j.ok()) return j.status();
  return ParseMechanismConfig(*j);
}

absl::StatusOr<BenchConfig> ParseBenchConfig(const json& j,
                                             uint64_t default_seed) {
  Fields f(j, "config");
  DPRP_RETURN_IF_ERROR(f.CheckObject());
  DPRP_RETURN_IF_ERROR(f.RejectUnknown(
      {"data", "database", "queries", "bound", "mechanisms", "r_grid", "gold",
       "knn", "seeds", "num_seeds", "beta", "delta", "jobs"}));
  BenchConfig b;
  RetrievalConfig& r = b.retrieval;
  r.data.seed = default_seed;
  if (f.Has("data")) {
    if (f.Has("database") || f.Has("queries")) {
      return FieldError("config.data",
                        "give either data or database/queries, not both");
    }
    auto s = ParseSynthetic(j.at("data"), "config.data", default_seed);
    if (!s.ok()) return s.status();
    r.data = *s;
  }
  DPRP_RETURN_IF_ERROR(f.String("database", &b.database_path));
  DPRP_RETURN_IF_ERROR(f.String("queries", &b.queries_path));
  if (b.database_path.empty() != b.queries_path.empty()) {
    return FieldError("config.queries",
                      "database and queries must be given together");
  }
  DPRP_RETURN_IF_ERROR(f.Number("bound", &b.bound));
  if (!(b.bound > 0)) return FieldError("config.bound", "must be positive");
  if (!f.Has("mechanisms")) return FieldError("config.mechanisms", "required");
  const json& mechs = j.at("mechanisms");
  if (!mechs.is_array() || mechs.empty()) {
    return FieldError("config.mechanisms", "expected a non-empty array");
  }
  for (size_t i = 0; i < mechs.size(); ++i) {
    const std::string path = absl::StrCat("config.mechanisms[", i, "]");
    Fields m(mechs[i], path);
    DPRP_RETURN_IF_ERROR(m.CheckObject());
    DPRP_RETURN_IF_ERROR(m.RejectUnknown(
        {"name", "epsilons", "k", "t", "m", "projection", "sensitivity_mode"}));
    BenchMechanism bm;
    DPRP_RETURN_IF_ERROR(m.String("name", &bm.name));
    const auto& known = KnownMechanisms();
    if (std::find(known.begin(), known.end(), bm.name) == known.end()) {
      return FieldError(m.Path("name"),
                        absl::StrCat("unknown mechanism '", bm.name, "'; ",
                                     SuggestionList(bm.name, known)));
    }
    DPRP_RETURN_IF_ERROR(m.Numbers("epsilons", &bm.epsilons));
    DPRP_RETURN_IF_ERROR(m.Integer("k", &bm.k));
    DPRP_RETURN_IF_ERROR(m.Integer("t", &bm.t));
    DPRP_RETURN_IF_ERROR(m.Number("m", &bm.m));
    DPRP_RETURN_IF_ERROR(m.String("projection", &bm.projection));
    std::string mode = "default";
    DPRP_RETURN_IF_ERROR(m.String("sensitivity_mode", &mode));
    auto parsed = ParseSensitivityMode(mode);
    if (!parsed.ok()) {
      return FieldError(m.Path("sensitivity_mode"), parsed.status().message());
    }
    bm.mode = *parsed;
    if (auto s = ValidateBenchMechanism(bm); !s.ok()) {
      return FieldError(path, s.message());
    }
    r.mechanisms.push_back(bm);
  }
  DPRP_RETURN_IF_ERROR(f.Integers("r_grid", &r.r_grid));
  DPRP_RETURN_IF_ERROR(f.Integer("gold", &r.gold));
  DPRP_RETURN_IF_ERROR(f.Integer("knn", &r.knn));
  DPRP_RETURN_IF_ERROR(f.Number("beta", &r.beta));
  DPRP_RETURN_IF_ERROR(f.Number("delta", &r.delta));
  DPRP_RETURN_IF_ERROR(f.Integer("jobs", &r.jobs));
  if (f.Has("seeds") && f.Has("num_seeds")) {
    return FieldError("config.num_seeds", "give either seeds or num_seeds");
  }
  r.seeds = {default_seed};
  DPRP_RETURN_IF_ERROR(f.Integers("seeds", &r.seeds));
  if (f.Has("num_seeds")) {
    int n = 0;
    DPRP_RETURN_IF_ERROR(f.Integer("num_seeds", &n));
    if (n < 1) return FieldError("config.num_seeds", "must be >= 1");
    r.seeds.clear();
    for (int i = 0; i < n; ++i) r.seeds.push_back(default_seed + i);
  }
  if (r.seeds.empty()) return FieldError("config.seeds", "must be non-empty");
  if (r.r_grid.empty()) return FieldError("config.r_grid", "must be non-empty");
  for (size_t i = 0; i < r.r_grid.size(); ++i) {
    if (r.r_grid[i] < 1) {
      return FieldError(absl::StrCat("config.r_grid[", i, "]"), "must be >= 1");
    }
  }
  if (r.gold < 1) return FieldError("config.gold", "must be >= 1");
  if (r.knn < 0) return FieldError("config.knn", "must be >= 0");
  if (!(r.beta > 0)) return FieldError("config.beta", "must be positive");
  if (!(r.delta > 0 && r.delta < 1)) {
    return FieldError("config.delta", "must lie in (0, 1)");
  }
  if (r.jobs < 1) return FieldError("config.jobs", "must be >= 1");
  return b;
}

absl::StatusOr<BenchConfig> LoadBenchConfig(const std::string& path,
                                            uint64_t default_seed) {
  auto j = ReadJsonFile(path);
  if (!j.ok()) return j.status();
  return ParseBenchConfig(*j, default_seed);
}

json ToJson(const MechanismConfig& c) {
  return json{{"variant", c.variant},
              {"epsilon", c.epsilon},
              {"delta", c.delta},
              {"beta", c.beta},
              {"k", c.k},
              {"t", c.t},
              {"m", c.m},
              {"projection", c.projection},
              {"sensitivity_mode", SensitivityModeName(c.mode)}};
}

json ToJson(const BenchConfig& c) {
  const RetrievalConfig& r = c.retrieval;
  json j;
  if (c.database_path.empty()) {
    j["data"] = {{"n_database", r.data.n_database},
                 {"n_queries", r.data.n_queries},
                 {"p", r.data.p},
                 {"norm", r.data.norm},
                 {"clusters", r.data.clusters},
                 {"spread", r.data.spread},
                 {"seed", r.data.seed}};
  } else {
    j["database"] = c.database_path;
    j["queries"] = c.queries_path;
    j["bound"] = c.bound;
  }
  json mechs = json::array();
  for (const auto& m : r.mechanisms) {
    mechs.push_back({{"name", m.name},
                     {"epsilons", m.epsilons},
                     {"k", m.k},
                     {"t", m.t},
                     {"m", m.m},
                     {"projection", ProjectionOf(m)},
                     {"sensitivity_mode", SensitivityModeName(m.mode)}});
  }
  j["mechanisms"] = mechs;
  j["r_grid"] = r.r_grid;
  j["gold"] = r.gold;
  j["knn"] = r.knn;
  j["seeds"] = r.seeds;
  j["beta"] = r.beta;
  j["delta"] = r.delta;
  return j;
}

json ToJson(const Provenance& p) {
  json j{{"mechanism", p.mechanism},
         {"spec_digest", p.spec_digest},
         {"projection_kind", p.projection_kind},
         {"is_private", p.is_private},
         {"budget",
          {{"epsilon", p.budget.epsilon},
           {"delta", p.budget.delta},
           {"beta", p.budget.beta},
           {"repetitions", p.budget.repetitions}}},
         {"sigma", p.sigma},
         {"lambda", p.lambda},
         {"delta1", p.delta1},
         {"delta2", p.delta2},
         {"sensitivity_basis", p.sensitivity_basis},
         {"heterogeneous_flips", p.heterogeneous_flips},
         {"lj_histogram", p.lj_histogram},
         {"zero_indices", p.zero_indices},
         {"vacuous_budget", p.vacuous_budget},
         {"notes", p.notes}};
  j["eps_prime"] = p.eps_prime ? json(*p.eps_prime) : json(nullptr);
  j["n_plus"] = p.n_plus ? json(*p.n_plus) : json(nullptr);
  return j;
}

absl::StatusOr<Provenance> ProvenanceFromJson(const json& j) {
  if (!j.is_object()) return absl::InvalidArgumentError("provenance: expected an object");
  try {
    Provenance p;
    p.mechanism = j.at("mechanism").get<std::string>();
    p.spec_digest = j.at("spec_digest").get<std::string>();
    p.projection_kind = j.at("projection_kind").get<std::string>();
    p.is_private = j.at("is_private").get<bool>();
    const json& b = j.at("budget");
    p.budget.epsilon = b.at("epsilon").get<double>();
    p.budget.delta = b.at("delta").get<double>();
    p.budget.beta = b.at("beta").get<double>();
    p.budget.repetitions = b.at("repetitions").get<int>();
    p.sigma = j.at("sigma").get<double>();
    p.lambda = j.at("lambda").get<double>();
    p.delta1 = j.at("delta1").get<double>();
    p.delta2 = j.at("delta2").get<double>();
    p.sensitivity_basis = j.at("sensitivity_basis").get<std::string>();
    p.heterogeneous_flips = j.at("heterogeneous_flips").get<bool>();
    p.lj_histogram = j.at("lj_histogram").get<std::vector<int>>();
    p.zero_indices = j.at("zero_indices").get<std::vector<int>>();
    p.vacuous_budget = j.at("vacuous_budget").get<bool>();
    p.notes = j.at("notes").get<std::vector<std::string>>();
    if (!j.at("eps_prime").is_null()) p.eps_prime = j.at("eps_prime").get<double>();
    if (!j.at("n_plus").is_null()) p.n_plus = j.at("n_plus").get<int>();
    return p;
  } catch (const json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("provenance: ", e.what()));
  }
}

}  // namespace dprp
