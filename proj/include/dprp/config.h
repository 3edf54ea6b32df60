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

// JSON configuration and provenance records.

#ifndef DPRP_CONFIG_H_
#define DPRP_CONFIG_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "dprp/dp_rp.h"
#include "dprp/projections.h"
#include "dprp/retrieval.h"
#include "json.hpp"

namespace dprp {

inline constexpr char kToolVersion[] = "0.1.0";

// One privatization mechanism. Missing fields take the defaults below.
struct MechanismConfig {
  std::string variant;
  double epsilon = 0;
  double delta = 1e-6;
  double beta = 1.0;
  int k = 256;
  int t = 1;
  double m = 0;
  std::string projection;
  SensitivityMode mode = SensitivityMode::kDefault;

  BenchMechanism ToBench() const;
};

// Benchmark configuration. Data come either from a synthetic spec or from
// user-supplied database and query files.
struct BenchConfig {
  RetrievalConfig retrieval;
  std::string database_path;
  std::string queries_path;
  double bound = 1.0;
};

std::string SensitivityModeName(SensitivityMode mode);
absl::StatusOr<SensitivityMode> ParseSensitivityMode(std::string_view name);

// "did you mean 'x'? expected one of a, b, c".
std::string SuggestionList(std::string_view given,
                           const std::vector<std::string>& choices);

absl::StatusOr<nlohmann::json> ReadJsonFile(const std::string& path);

// Errors name the offending field, e.g. "config.epsilon: ...".
absl::StatusOr<MechanismConfig> ParseMechanismConfig(
    const nlohmann::json& j, const std::string& path = "config");
absl::Status ValidateMechanismConfig(const MechanismConfig& c,
                                     const std::string& path = "config");
absl::StatusOr<MechanismConfig> LoadMechanismConfig(const std::string& path);

// `default_seed` fills data.seed and seeds when the file omits them.
absl::StatusOr<BenchConfig> ParseBenchConfig(const nlohmann::json& j,
                                             uint64_t default_seed = 1);
absl::StatusOr<BenchConfig> LoadBenchConfig(const std::string& path,
                                            uint64_t default_seed = 1);

nlohmann::json ToJson(const MechanismConfig& c);
nlohmann::json ToJson(const BenchConfig& c);
nlohmann::json ToJson(const Provenance& p);
absl::StatusOr<Provenance> ProvenanceFromJson(const nlohmann::json& j);

}  // namespace dprp

#endif  // DPRP_CONFIG_H_
