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

#include "dprp/cli.h"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "dprp/analytic.h"
#include "dprp/audit.h"
#include "dprp/config.h"
#include "dprp/estimators.h"
#include "dprp/matrix_io.h"
#include "dprp/mechanisms.h"
#include "dprp/oracle.h"
#include "dprp/retrieval.h"
#include "dprp/synthetic.h"

namespace dprp {
namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

enum class LogLevel { kError, kWarn, kInfo, kDebug };

class Logger {
 public:
  explicit Logger(std::ostream& err) : err_(err) {
    const char* env = std::getenv("DPRP_LOG");
    if (env == nullptr) return;
    const std::string v = env;
    if (v == "error") {
      level_ = LogLevel::kError;
    } else if (v == "warn") {
      level_ = LogLevel::kWarn;
    } else if (v == "info") {
      level_ = LogLevel::kInfo;
    } else if (v == "debug") {
      level_ = LogLevel::kDebug;
    } else {
      Log(LogLevel::kWarn, absl::StrCat("ignoring DPRP_LOG=", v,
                                        "; expected error, warn, info or debug"));
    }
  }

  void Log(LogLevel level, const std::string& msg) const {
    if (level > level_) return;
    static constexpr const char* kNames[] = {"error", "warn", "info", "debug"};
    err_ << "dprp [" << kNames[static_cast<int>(level)] << "] " << msg << "\n";
  }

 private:
  std::ostream& err_;
  LogLevel level_ = LogLevel::kWarn;
};

std::string Num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void ParallelFor(size_t n, int jobs, const std::function<void(size_t)>& fn) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(n)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

struct GlobalOptions {
  uint64_t seed = 1;
  int jobs = 1;
  std::string config;
  std::string out;
};

// Output routing plus the run manifest. With an output directory every
// table goes to a file and a manifest is written next to it; otherwise tables
// go to stdout.
class Run {
 public:
  Run(std::string subcommand, const GlobalOptions& g, std::ostream& out,
      const Logger& log)
      : subcommand_(std::move(subcommand)), g_(g), out_(out), log_(log),
        start_(Clock::now()) {}

  json& config() { return config_; }
  void AddSeed(uint64_t s) { seeds_.push_back(s); }
  bool has_out_dir() const { return !g_.out.empty(); }

  void AddInput(const std::string& path) {
    inputs_[path] = DigestOfString(ReadFileBytes(path));
  }

  absl::Status Prepare() {
    if (g_.out.empty()) return absl::OkStatus();
    std::error_code ec;
    std::filesystem::create_directories(g_.out, ec);
    if (ec) {
      return absl::InvalidArgumentError(
          absl::StrCat("cannot create output directory ", g_.out, ": ",
                       ec.message()));
    }
    return absl::OkStatus();
  }

  std::string PathFor(const std::string& name) const {
    return (std::filesystem::path(g_.out) / name).string();
  }

  // Table output: a file under --out, else stdout.
  absl::Status Emit(const std::string& name, const std::string& content) {
    if (g_.out.empty()) {
      out_ << content;
      return absl::OkStatus();
    }
    const std::string path = PathFor(name);
    std::ofstream f(path, std::ios::binary);
    f << content;
    if (!f) return absl::InternalError(absl::StrCat("cannot write ", path));
    outputs_[name] = DigestOfString(content);
    log_.Log(LogLevel::kInfo, absl::StrCat("wrote ", path));
    return absl::OkStatus();
  }

  // Records a file written by other code.
  void AddOutput(const std::string& name) {
    outputs_[name] = DigestOfString(ReadFileBytes(PathFor(name)));
    log_.Log(LogLevel::kInfo, absl::StrCat("wrote ", PathFor(name)));
  }

  absl::Status Finish() {
    if (g_.out.empty()) return absl::OkStatus();
    json m;
    m["version"] = kToolVersion;
    m["subcommand"] = subcommand_;
    m["config"] = config_;
    m["seeds"] = seeds_;
    m["inputs"] = inputs_;
    m["outputs"] = outputs_;
    m["wall_clock_seconds"] =
        std::chrono::duration<double>(Clock::now() - start_).count();
    const std::string path = PathFor("manifest.json");
    std::ofstream f(path);
    f << m.dump(2) << "\n";
    if (!f) return absl::InternalError(absl::StrCat("cannot write ", path));
    return absl::OkStatus();
  }

 private:
  std::string subcommand_;
  const GlobalOptions& g_;
  std::ostream& out_;
  const Logger& log_;
  Clock::time_point start_;
  json config_ = json::object();
  std::vector<uint64_t> seeds_;
  std::map<std::string, std::string> inputs_;
  std::map<std::string, std::string> outputs_;
};

// ---- calibrate ----

struct CalibrateOptions {
  std::vector<double> eps;
  std::vector<double> delta = {1e-6};
  std::vector<double> delta2 = {1.0};
};

absl::Status RunCalibrate(const CalibrateOptions& o, Run& run) {
  run.config() = {{"eps", o.eps}, {"delta", o.delta}, {"delta2", o.delta2}};
  std::string csv =
      "epsilon,delta,sensitivity,sigma_optimal,sigma_classic,laplace_lambda\n";
  for (double e : o.eps) {
    for (double d : o.delta) {
      for (double s : o.delta2) {
        auto opt = OptimalGaussianSigma(s, e, d);
        if (!opt.ok()) return opt.status();
        auto classic = ClassicGaussianSigma(s, e, d);
        auto lambda = LaplaceLambda(s, e);
        if (!lambda.ok()) return lambda.status();
        absl::StrAppend(&csv, Num(e), ",", Num(d), ",", Num(s), ",", Num(*opt),
                        ",", classic.ok() ? Num(*classic) : "", ",",
                        Num(*lambda), "\n");
      }
    }
  }
  return run.Emit("calibrate.csv", csv);
}

// ---- analytic ----

using Params = std::map<std::string, double>;

struct AnalyticFn {
  std::vector<std::string> params;
  std::vector<std::string> outputs;
  std::function<absl::StatusOr<std::vector<double>>(const Params&)> eval;
};

template <typename T>
absl::StatusOr<std::vector<double>> One(const absl::StatusOr<T>& v) {
  if (!v.ok()) return v.status();
  return std::vector<double>{static_cast<double>(*v)};
}

absl::StatusOr<std::vector<double>> Tail(
    const absl::StatusOr<TailBoundResult>& v) {
  if (!v.ok()) return v.status();
  return std::vector<double>{v->threshold, v->bound};
}

const std::map<std::string, AnalyticFn>& AnalyticFunctions() {
  static const auto* fns = new std::map<std::string, AnalyticFn>{
      {"p_plus_gaussian",
       {{"r", "p"}, {"value"}, [](const Params& a) {
          return One(PPlusGaussian(a.at("r"), std::llround(a.at("p"))));
        }}},
      {"p_plus_rademacher",
       {{"r", "p"}, {"value", "small_p_warning"},
        [](const Params& a) -> absl::StatusOr<std::vector<double>> {
          auto v = PPlusRademacher(a.at("r"), std::llround(a.at("p")));
          if (!v.ok()) return v.status();
          return std::vector<double>{v->value, v->small_p_warning ? 1.0 : 0.0};
        }}},
      {"n_plus_bound",
       {{"norm", "beta", "delta", "k", "p", "flavor"},
        {"n_plus", "f", "capped", "beta_exceeds_norm"},
        [](const Params& a) -> absl::StatusOr<std::vector<double>> {
          auto v = NPlusBoundOrCap(
              a.at("norm"), a.at("beta"), a.at("delta"),
              static_cast<int>(std::llround(a.at("k"))), std::llround(a.at("p")),
              a.at("flavor") == 0 ? NPlusFlavor::kGaussian
                                  : NPlusFlavor::kRademacher);
          if (!v.ok()) return v.status();
          return std::vector<double>{static_cast<double>(v->value), v->f,
                                     v->capped ? 1.0 : 0.0,
                                     v->beta_exceeds_norm ? 1.0 : 0.0};
        }}},
      {"chi_square_tail",
       {{"n", "t"}, {"threshold", "bound"}, [](const Params& a) {
          return Tail(ChiSquareTail(static_cast<int>(a.at("n")), a.at("t")));
        }}},
      {"half_normal_tail",
       {{"n", "t"}, {"threshold", "bound"}, [](const Params& a) {
          return Tail(HalfNormalTail(static_cast<int>(a.at("n")), a.at("t")));
        }}},
      {"binomial_tail",
       {{"n", "prob", "eta"}, {"threshold", "bound"}, [](const Params& a) {
          return Tail(BinomialTail(static_cast<int>(a.at("n")), a.at("prob"),
                                   a.at("eta")));
        }}},
      {"abs_exceed_prob",
       {{"r", "rho"}, {"value"}, [](const Params& a) {
          return One(AbsExceedProb(a.at("r"), a.at("rho")));
        }}},
      {"conditional_abs_expectation",
       {{"r", "rho", "sigma-x"}, {"value"}, [](const Params& a) {
          return One(ConditionalAbsExpectation(a.at("r"), a.at("rho"),
                                               a.at("sigma-x")));
        }}},
      {"conditional_tail_bound",
       {{"t", "sigma-x"}, {"value"}, [](const Params& a) {
          return One(ConditionalTailBound(a.at("t"), a.at("sigma-x")));
        }}},
      {"sign_angle_variance",
       {{"theta", "k"}, {"value"}, [](const Params& a) {
          return One(SignRpAngleVariance(a.at("theta"),
                                         static_cast<int>(a.at("k"))));
        }}},
      {"rr_variance_factor",
       {{"theta", "eps-prime"}, {"value"}, [](const Params& a) {
          return One(RrVarianceFactor(a.at("theta"), a.at("eps-prime")));
        }}},
      {"rr_angle_variance",
       {{"theta", "k", "eps-prime"}, {"value"}, [](const Params& a) {
          return One(RrAngleVariance(a.at("theta"), static_cast<int>(a.at("k")),
                                     a.at("eps-prime")));
        }}},
      {"rr_flip_probability",
       {{"eps-prime"}, {"value"},
        [](const Params& a) -> absl::StatusOr<std::vector<double>> {
          if (!(a.at("eps-prime") >= 0)) {
            return absl::InvalidArgumentError("eps-prime must be >= 0");
          }
          return std::vector<double>{RrFlipProbability(a.at("eps-prime"))};
        }}},
      {"variance_ratio",
       {{"p", "k", "sigma"}, {"value"}, [](const Params& a) {
          return One(VarianceRatio(std::llround(a.at("p")),
                                   static_cast<int>(a.at("k")), a.at("sigma")));
        }}},
      {"k_star",
       {{"theta", "eps", "f"}, {"value"}, [](const Params& a) {
          return One(OptimalKStar(a.at("theta"), a.at("eps"), a.at("f")));
        }}},
      {"privacy_profile",
       {{"sigma", "delta2", "eps"}, {"value"},
        [](const Params& a) -> absl::StatusOr<std::vector<double>> {
          if (!(a.at("sigma") > 0 && a.at("delta2") > 0 && a.at("eps") >= 0)) {
            return absl::InvalidArgumentError(
                "sigma and delta2 must be positive, eps >= 0");
          }
          return std::vector<double>{GaussianPrivacyProfile(
              a.at("sigma"), a.at("delta2"), a.at("eps"))};
        }}},
      {"sensitivity_l2_bound",
       {{"p", "k", "beta", "delta"}, {"value"}, [](const Params& a) {
          return One(SensitivityL2Bound(std::llround(a.at("p")),
                                        static_cast<int>(a.at("k")),
                                        a.at("beta"), a.at("delta")));
        }}},
      {"sensitivity_l1_bound",
       {{"p", "k", "beta", "delta"}, {"value"}, [](const Params& a) {
          return One(SensitivityL1Bound(std::llround(a.at("p")),
                                        static_cast<int>(a.at("k")),
                                        a.at("beta"), a.at("delta")));
        }}},
  };
  return *fns;
}

const std::vector<std::string>& AnalyticParamNames() {
  static const auto* names = new std::vector<std::string>{
      "r",     "p",     "k",       "n",     "t",     "norm",  "beta",
      "delta", "prob",  "eta",     "rho",   "sigma-x", "theta", "eps-prime",
      "sigma", "delta2", "eps",    "f",     "flavor"};
  return *names;
}

bool IsIntegerParam(const std::string& name) {
  return name == "p" || name == "k" || name == "n";
}

absl::StatusOr<double> ParseParamValue(const std::string& name,
                                       const std::string& text) {
  if (name == "flavor") {
    if (text == "gaussian") return 0.0;
    if (text == "rademacher") return 1.0;
    return absl::InvalidArgumentError(absl::StrCat(
        "--flavor: expected gaussian or rademacher, got '", text, "'"));
  }
  double v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    if (text == "inf") {
      v = INFINITY;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("--", name, ": not a number: '", text, "'"));
    }
  }
  if (IsIntegerParam(name) && (v != std::floor(v) || !std::isfinite(v))) {
    return absl::InvalidArgumentError(
        absl::StrCat("--", name, ": expected an integer, got '", text, "'"));
  }
  return v;
}

absl::Status RunAnalytic(const std::string& fn_name,
                         const std::map<std::string, std::vector<std::string>>& given,
                         Run& run) {
  const auto& fns = AnalyticFunctions();
  auto it = fns.find(fn_name);
  if (it == fns.end()) {
    std::vector<std::string> names;
    for (const auto& [n, f] : fns) names.push_back(n);
    return absl::InvalidArgumentError(
        absl::StrCat("unknown function '", fn_name, "'; ",
                     SuggestionList(fn_name, names)));
  }
  const AnalyticFn& fn = it->second;
  std::vector<std::vector<double>> values;
  json echo = {{"fn", fn_name}};
  for (const auto& [name, texts] : given) {
    if (texts.empty()) continue;
    if (std::find(fn.params.begin(), fn.params.end(), name) == fn.params.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("--", name, " is not a parameter of ", fn_name,
                       "; expected ", absl::StrJoin(fn.params, ", ")));
    }
  }
  for (const auto& p : fn.params) {
    auto g = given.find(p);
    if (g == given.end() || g->second.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat(fn_name, " requires --", p));
    }
    std::vector<double> vals;
    for (const auto& t : g->second) {
      auto v = ParseParamValue(p, t);
      if (!v.ok()) return v.status();
      vals.push_back(*v);
    }
    echo[p] = g->second;
    values.push_back(vals);
  }
  run.config() = echo;
  std::string csv = absl::StrCat(absl::StrJoin(fn.params, ","), ",",
                                 absl::StrJoin(fn.outputs, ","), "\n");
  std::vector<size_t> idx(values.size(), 0);
  while (true) {
    Params a;
    std::vector<std::string> cells;
    for (size_t i = 0; i < values.size(); ++i) {
      a[fn.params[i]] = values[i][idx[i]];
      cells.push_back(fn.params[i] == "flavor"
                          ? given.at("flavor")[idx[i]]
                          : Num(values[i][idx[i]]));
    }
    auto r = fn.eval(a);
    if (!r.ok()) return r.status();
    for (double v : *r) cells.push_back(Num(v));
    absl::StrAppend(&csv, absl::StrJoin(cells, ","), "\n");
    size_t d = values.size();
    while (d > 0) {
      --d;
      if (++idx[d] < values[d].size()) break;
      idx[d] = 0;
      if (d == 0) return run.Emit("analytic.csv", csv);
    }
    if (values.empty()) return run.Emit("analytic.csv", csv);
  }
}

// ---- privatize ----

struct PrivatizeOptions {
  std::string input;
  double bound = 1.0;
  std::string variant;
  double eps = 0;
  double delta = 1e-6;
  double beta = 1.0;
  int k = 256;
  int t = 1;
  double m = 0;
  std::string projection;
  std::string mode = "default";
  bool sign = false;
  bool idp = false;
  std::string precision = "float64";
};

absl::StatusOr<std::string> ResolveVariant(const std::string& v, bool sign,
                                           bool idp) {
  if (sign && idp) {
    return absl::InvalidArgumentError("--sign and --idp are exclusive");
  }
  static const std::map<std::string, std::string> kSign = {
      {"rr", "signrp_rr"},
      {"rr-smooth", "signrp_rr_smooth"},
      {"oporp-rr", "signoporp_rr"},
      {"oporp-rr-smooth", "signoporp_rr_smooth"},
      {"none", "signrp"}};
  static const std::map<std::string, std::string> kIdp = {
      {"g", "idp_signrp_g"}, {"rr", "idp_signrp_rr"}};
  const auto& table = sign ? kSign : kIdp;
  if (!sign && !idp) return v;
  auto it = table.find(v);
  if (it != table.end()) return it->second;
  std::vector<std::string> names;
  for (const auto& [n, full] : table) names.push_back(n);
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown ", sign ? "--sign" : "--idp", " variant '", v, "'; ",
      SuggestionList(v, names)));
}

absl::Status RunPrivatize(PrivatizeOptions o, const CLI::App& sub,
                          const GlobalOptions& g, Run& run) {
  if (!run.has_out_dir()) {
    return absl::InvalidArgumentError("privatize requires --out");
  }
  MechanismConfig cfg;
  if (!g.config.empty()) {
    auto loaded = LoadMechanismConfig(g.config);
    if (!loaded.ok()) return loaded.status();
    cfg = *loaded;
    run.AddInput(g.config);
  }
  auto given = [&](const char* name) { return sub.count(name) > 0; };
  if (given("--variant") || g.config.empty()) {
    auto v = ResolveVariant(o.variant, o.sign, o.idp);
    if (!v.ok()) return v.status();
    cfg.variant = *v;
  }
  if (given("--eps")) cfg.epsilon = o.eps;
  if (given("--delta")) cfg.delta = o.delta;
  if (given("--beta")) cfg.beta = o.beta;
  if (given("--k")) cfg.k = o.k;
  if (given("--t")) cfg.t = o.t;
  if (given("--m")) cfg.m = o.m;
  if (given("--projection")) cfg.projection = o.projection;
  if (given("--mode")) {
    auto m = ParseSensitivityMode(o.mode);
    if (!m.ok()) return m.status();
    cfg.mode = *m;
  }
  if (auto s = ValidateMechanismConfig(cfg); !s.ok()) return s;
  if (o.precision != "float64" && o.precision != "float32") {
    return absl::InvalidArgumentError(
        "--precision: expected float64 or float32");
  }
  auto data = ReadDataset(o.input, o.bound);
  if (!data.ok()) return data.status();
  run.AddInput(o.input);
  if (auto s = ValidateDataset(*data).ToStatus(); !s.ok()) return s;
  run.config() = ToJson(cfg);
  run.config()["input"] = o.input;
  run.config()["bound"] = o.bound;
  run.config()["precision"] = o.precision;
  run.AddSeed(g.seed);

  auto privatize = MakePrivatizer(cfg.ToBench(), cfg.epsilon, cfg.beta,
                                  cfg.delta, data->dim(), g.seed);
  if (!privatize.ok()) return privatize.status();
  const RngStream noise =
      RngStream(g.seed, kNoiseStream).Split(cfg.variant);
  std::vector<absl::StatusOr<Sketch>> sketches(data->size(),
                                              absl::InternalError("unset"));
  ParallelFor(data->size(), g.jobs, [&](size_t i) {
    auto u = data->Row(i);
    if (!u.ok()) {
      sketches[i] = u.status();
      return;
    }
    RngStream rng = noise.Split(static_cast<uint64_t>(i));
    sketches[i] = (*privatize)(*u, rng);
  });
  const bool sign = IsSignMechanism(cfg.variant);
  std::vector<std::vector<double>> real;
  std::vector<std::vector<int8_t>> signs;
  json provenance = json::array();
  for (auto& s : sketches) {
    if (!s.ok()) return s.status();
    if (sign) {
      signs.push_back(s->signs);
    } else {
      real.push_back(s->values);
    }
    provenance.push_back(ToJson(s->provenance));
  }
  const std::string payload = sign ? "signs.bin" : "sketches.bin";
  absl::Status w =
      sign ? WriteSignsFile(run.PathFor(payload), signs)
           : WriteMatrixFile(run.PathFor(payload), real,
                             o.precision == "float32" ? StoredPrecision::kFloat32
                                                      : StoredPrecision::kFloat64);
  if (!w.ok()) return w;
  run.AddOutput(payload);
  json sidecar = ToJson(cfg);
  sidecar["seed"] = g.seed;
  sidecar["rows"] = data->size();
  sidecar["payload"] = payload;
  sidecar["precision"] = o.precision;
  if (!sketches.empty()) {
    const Provenance& p0 = sketches.front()->provenance;
    sidecar["sigma"] = p0.sigma;
    sidecar["lambda"] = p0.lambda;
    sidecar["delta1"] = p0.delta1;
    sidecar["delta2"] = p0.delta2;
    sidecar["sensitivity_basis"] = p0.sensitivity_basis;
  }
  sidecar["provenance"] = provenance;
  return run.Emit("provenance.json", sidecar.dump(2) + "\n");
}

// ---- estimate ----

absl::StatusOr<std::vector<Sketch>> LoadSketches(const std::string& dir,
                                                 Run& run) {
  const std::string side = (std::filesystem::path(dir) / "provenance.json").string();
  auto j = ReadJsonFile(side);
  if (!j.ok()) return j.status();
  run.AddInput(side);
  if (!j->contains("payload") || !j->contains("provenance")) {
    return absl::InvalidArgumentError(
        absl::StrCat(side, ": missing payload or provenance"));
  }
  const std::string payload = j->at("payload").get<std::string>();
  const std::string path = (std::filesystem::path(dir) / payload).string();
  std::vector<Sketch> out;
  const json& prov = j->at("provenance");
  if (payload == "signs.bin") {
    auto rows = ReadSignsFile(path);
    if (!rows.ok()) return rows.status();
    for (auto& r : *rows) {
      Sketch s;
      s.payload = Sketch::Payload::kSign;
      s.signs = std::move(r);
      out.push_back(std::move(s));
    }
  } else {
    auto rows = ReadMatrixFile(path);
    if (!rows.ok()) return rows.status();
    for (auto& r : *rows) {
      Sketch s;
      s.values = std::move(r);
      out.push_back(std::move(s));
    }
  }
  run.AddInput(path);
  if (!prov.is_array() || prov.size() != out.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat(side, ": provenance count does not match ", path));
  }
  for (size_t i = 0; i < out.size(); ++i) {
    auto p = ProvenanceFromJson(prov[i]);
    if (!p.ok()) return p.status();
    out[i].provenance = *std::move(p);
  }
  return out;
}

absl::StatusOr<EstimateReport> EstimatePair(const Sketch& a, const Sketch& b,
                                            const std::string& estimator) {
  std::string e = estimator;
  if (e == "auto") {
    if (!a.is_sign()) {
      e = "inner_product";
    } else if (!a.provenance.is_private) {
      e = "angle";
    } else if (a.provenance.eps_prime && !a.provenance.heterogeneous_flips) {
      e = "rr_angle";
    } else {
      e = "hamming";
    }
  }
  if (e == "inner_product") return InnerProduct(a, b);
  if (e == "cosine") return CosineNormalized(a, b);
  if (e == "angle") return AngleFromSigns(a, b);
  if (e == "rr_angle") {
    if (!a.provenance.eps_prime) {
      return absl::InvalidArgumentError(
          "rr_angle needs sketches with a homogeneous per-bit budget");
    }
    return AngleFromRrSigns(a, b, *a.provenance.eps_prime);
  }
  if (e == "hamming") {
    if (!a.is_sign() || !b.is_sign() || a.size() != b.size()) {
      return absl::InvalidArgumentError(
          "hamming needs sign sketches of equal length");
    }
    if (a.provenance.spec_digest != b.provenance.spec_digest) {
      return absl::InvalidArgumentError(
          "sketches come from different projections");
    }
    EstimateReport r;
    r.estimator = "hamming";
    r.estimate = HammingDistance(a.signs, b.signs);
    return r;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown estimator '", estimator, "'; ",
      SuggestionList(estimator, {"auto", "inner_product", "cosine", "angle",
                                 "rr_angle", "hamming"})));
}

absl::Status RunEstimate(const std::string& a_dir, const std::string& b_dir,
                         const std::string& estimator, Run& run) {
  run.config() = {{"a", a_dir}, {"b", b_dir}, {"estimator", estimator}};
  auto a = LoadSketches(a_dir, run);
  if (!a.ok()) return a.status();
  std::optional<std::vector<Sketch>> b;
  if (!b_dir.empty()) {
    auto loaded = LoadSketches(b_dir, run);
    if (!loaded.ok()) return loaded.status();
    b = *std::move(loaded);
  }
  std::string csv = "a,b,estimator,estimate,variance,out_of_range\n";
  auto add = [&](size_t i, size_t j, const Sketch& x,
                 const Sketch& y) -> absl::Status {
    auto r = EstimatePair(x, y, estimator);
    if (!r.ok()) {
      return absl::Status(r.status().code(),
                          absl::StrCat("pair (", i, ", ", j, "): ",
                                       r.status().message()));
    }
    absl::StrAppend(&csv, i, ",", j, ",", r->estimator, ",", Num(r->estimate),
                    ",", r->variance ? Num(*r->variance) : "", ",",
                    r->out_of_range ? 1 : 0, "\n");
    return absl::OkStatus();
  };
  if (b) {
    for (size_t i = 0; i < a->size(); ++i) {
      for (size_t j = 0; j < b->size(); ++j) {
        if (auto s = add(i, j, (*a)[i], (*b)[j]); !s.ok()) return s;
      }
    }
  } else {
    for (size_t i = 0; i < a->size(); ++i) {
      for (size_t j = i + 1; j < a->size(); ++j) {
        if (auto s = add(i, j, (*a)[i], (*a)[j]); !s.ok()) return s;
      }
    }
  }
  return run.Emit("estimates.csv", csv);
}

// ---- bench ----

absl::Status RunBench(const GlobalOptions& g, bool jobs_given, Run& run,
                      const Logger& log) {
  if (g.config.empty()) {
    return absl::InvalidArgumentError("bench retrieval requires --config");
  }
  auto cfg = LoadBenchConfig(g.config, g.seed);
  if (!cfg.ok()) return cfg.status();
  run.AddInput(g.config);
  if (jobs_given) cfg->retrieval.jobs = g.jobs;
  SyntheticData data;
  if (cfg->database_path.empty()) {
    auto made = MakeSyntheticData(cfg->retrieval.data);
    if (!made.ok()) return made.status();
    data = *std::move(made);
  } else {
    auto db = ReadDataset(cfg->database_path, cfg->bound);
    if (!db.ok()) return db.status();
    auto qs = ReadDataset(cfg->queries_path, cfg->bound);
    if (!qs.ok()) return qs.status();
    run.AddInput(cfg->database_path);
    run.AddInput(cfg->queries_path);
    data.database = *std::move(db);
    data.queries = *std::move(qs);
    data.database_labels.assign(data.database.size(), 0);
    data.query_labels.assign(data.queries.size(), 0);
    if (cfg->retrieval.knn > 0) {
      log.Log(LogLevel::kWarn, "user-supplied data carry no labels; knn disabled");
      cfg->retrieval.knn = 0;
    }
  }
  run.config() = ToJson(*cfg);
  for (uint64_t s : cfg->retrieval.seeds) run.AddSeed(s);
  log.Log(LogLevel::kInfo,
          absl::StrCat("running ", cfg->retrieval.mechanisms.size(),
                       " mechanisms over ", cfg->retrieval.seeds.size(),
                       " seeds with ", cfg->retrieval.jobs, " jobs"));
  auto rows = RunRetrieval(data, cfg->retrieval);
  if (!rows.ok()) return rows.status();
  return run.Emit("metrics.csv", MetricsCsv(*rows));
}

// ---- audit ----

struct AuditOptions {
  std::string mechanism;
  std::vector<double> eps;
  int grid = 21;
  double delta = 1e-6;
  double beta = 1.0;
  int p = 4;
  int k = 8;
  int t = 1;
  std::string projection;
  std::string mutation = "none";
};

absl::Status RunAuditCommand(const AuditOptions& o, const GlobalOptions& g,
                             Run& run) {
  auto mutation = ParseMutation(o.mutation);
  if (!mutation.ok()) return mutation.status();
  run.config() = {{"mechanism", o.mechanism}, {"eps", o.eps},
                  {"grid", o.grid},           {"delta", o.delta},
                  {"beta", o.beta},           {"p", o.p},
                  {"k", o.k},                 {"t", o.t},
                  {"projection", o.projection}, {"mutation", o.mutation}};
  run.AddSeed(g.seed);
  std::string csv =
      "mechanism,epsilon,mutation,scope,claimed_epsilon,claimed_delta,worst,"
      "margin,pass,neighbours,max_changed_bits\n";
  for (double e : o.eps) {
    AuditSetup s;
    s.mechanism = o.mechanism;
    s.epsilon = e;
    s.delta = o.delta;
    s.beta = o.beta;
    s.p = o.p;
    s.k = o.k;
    s.t = o.t;
    s.grid_points = o.grid;
    s.projection = o.projection;
    s.seed = g.seed;
    s.mutation = *mutation;
    auto reports = RunAudit(s);
    if (!reports.ok()) return reports.status();
    for (const auto& r : *reports) {
      absl::StrAppend(&csv, r.mechanism, ",", Num(e), ",", o.mutation, ",",
                      AuditScopeName(r.scope), ",", Num(r.claimed_epsilon), ",",
                      Num(r.claimed_delta), ",", Num(r.worst), ",",
                      Num(r.margin), ",", r.pass ? "PASS" : "FAIL", ",",
                      r.neighbours, ",", r.max_changed_bits, "\n");
    }
  }
  return run.Emit("audit.csv", csv);
}

// ---- oracle ----

struct OracleOptions {
  std::string target;
  long long n = 100000;
  OracleQuery q;
};

absl::Status RunOracle(OracleOptions o, const GlobalOptions& g, Run& run) {
  auto t = ParseOracleTarget(o.target);
  if (!t.ok()) {
    std::vector<std::string> names;
    for (OracleTarget x :
         {OracleTarget::kCollision, OracleTarget::kPPlusGaussian,
          OracleTarget::kPPlusRademacher, OracleTarget::kOporpRpRatio,
          OracleTarget::kNPlusExceedance}) {
      names.push_back(OracleTargetName(x));
    }
    return absl::InvalidArgumentError(
        absl::StrCat("unknown oracle target '", o.target, "'; ",
                     SuggestionList(o.target, names)));
  }
  o.q.target = *t;
  run.config() = {{"target", o.target}, {"n", o.n},
                  {"theta", o.q.theta}, {"r", o.q.r},
                  {"p", o.q.p},         {"k", o.q.k},
                  {"eps_prime", Num(o.q.eps_prime)},
                  {"beta", o.q.beta},   {"norm", o.q.norm},
                  {"delta", o.q.delta}};
  run.AddSeed(g.seed);
  auto r = MonteCarloOracle(o.q, o.n, g.seed);
  if (!r.ok()) return r.status();
  return run.Emit("oracle.csv",
                  absl::StrCat("target,estimate,standard_error,samples,analytic\n",
                               o.target, ",", Num(r->estimate), ",",
                               Num(r->standard_error), ",", r->samples, ",",
                               Num(r->analytic), "\n"));
}

std::string StatusCodeName(absl::StatusCode code) {
  std::string s = absl::StatusCodeToString(code);
  for (auto& c : s) c = static_cast<char>(std::tolower(c));
  return s;
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInternal:
    case absl::StatusCode::kResourceExhausted:
    case absl::StatusCode::kDeadlineExceeded:
    case absl::StatusCode::kAborted:
      return kExitCalibration;
    default:
      return kExitValidation;
  }
}

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  const Logger log(err);
  CLI::App app{"Differentially private random projections and sign sketches.",
               "dprp"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "Top-level seed for every random stream");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--config", g.config, "JSON configuration file");
  app.add_option("--out", g.out, "Output directory (tables go to stdout if unset)");

  CalibrateOptions cal;
  auto* calibrate = app.add_subcommand(
      "calibrate", "Noise scales over (eps, delta, sensitivity) grids");
  calibrate->add_option("--eps", cal.eps, "Privacy budgets")
      ->required()
      ->delimiter(',');
  calibrate->add_option("--delta", cal.delta, "Failure probabilities")
      ->delimiter(',');
  calibrate->add_option("--delta2", cal.delta2, "Sensitivities")->delimiter(',');

  std::string fn_name;
  std::map<std::string, std::vector<std::string>> params;
  auto* analytic =
      app.add_subcommand("analytic", "Evaluate closed-form quantities as CSV");
  analytic->add_option("--fn", fn_name, "Function name")->required();
  for (const auto& p : AnalyticParamNames()) {
    analytic->add_option("--" + p, params[p], "Comma-separated values")
        ->delimiter(',');
  }

  PrivatizeOptions po;
  auto* privatize =
      app.add_subcommand("privatize", "Privatize the rows of a dataset");
  privatize->add_option("--input", po.input, "CSV or DPRPMAT1 dataset")
      ->required();
  privatize->add_option("--bound", po.bound, "Per-coordinate bound C");
  privatize->add_option("--variant", po.variant, "Mechanism");
  privatize->add_option("--eps", po.eps, "Privacy budget");
  privatize->add_option("--delta", po.delta, "Failure probability");
  privatize->add_option("--beta", po.beta, "Neighbour distance");
  privatize->add_option("--k", po.k, "Projections");
  privatize->add_option("--t", po.t, "Repetitions for SignOPORP");
  privatize->add_option("--m", po.m, "Norm lower bound for sign RR");
  privatize->add_option("--projection", po.projection, "Projection kind");
  privatize->add_option("--mode", po.mode, "Sensitivity mode");
  privatize->add_flag("--sign", po.sign, "Sign variants: rr, rr-smooth, "
                                         "oporp-rr, oporp-rr-smooth");
  privatize->add_flag("--idp", po.idp, "Individual-DP variants: g, rr");
  privatize->add_option("--precision", po.precision,
                        "float64 or float32 (lossy)");

  std::string est_a, est_b, estimator = "auto";
  auto* estimate =
      app.add_subcommand("estimate", "Pairwise estimates from sketch files");
  estimate->add_option("--a", est_a, "Directory written by privatize")
      ->required();
  estimate->add_option("--b", est_b, "Second directory; default: pairs in --a");
  estimate->add_option("--estimator", estimator,
                       "auto, inner_product, cosine, angle, rr_angle, hamming");

  std::string task;
  auto* bench = app.add_subcommand("bench", "Benchmarks");
  bench->add_option("task", task, "Benchmark task")
      ->required()
      ->check(CLI::IsMember({"retrieval"}));

  AuditOptions ao;
  auto* audit = app.add_subcommand("audit", "Exact privacy audit");
  audit->add_option("--mechanism", ao.mechanism, "Mechanism")->required();
  audit->add_option("--eps", ao.eps, "Budgets")->required()->delimiter(',');
  audit->add_option("--grid", ao.grid, "Neighbour grid points per coordinate");
  audit->add_option("--delta", ao.delta, "Failure probability");
  audit->add_option("--beta", ao.beta, "Neighbour distance");
  audit->add_option("--p", ao.p, "Dimension");
  audit->add_option("--k", ao.k, "Projections");
  audit->add_option("--t", ao.t, "Repetitions for SignOPORP");
  audit->add_option("--projection", ao.projection, "Projection kind");
  audit->add_option("--mutation", ao.mutation,
                    "none, halved_flip, dropped_coin, halved_sigma");

  OracleOptions oo;
  auto* oracle = app.add_subcommand("oracle", "Monte Carlo oracles");
  oracle->add_option("--target", oo.target, "Quantity")->required();
  oracle->add_option("--n", oo.n, "Samples");
  oracle->add_option("--theta", oo.q.theta, "Angle");
  oracle->add_option("--r", oo.q.r, "Ratio beta / norm");
  oracle->add_option("--p", oo.q.p, "Dimension");
  oracle->add_option("--k", oo.q.k, "Projections");
  oracle->add_option("--eps-prime", oo.q.eps_prime, "Per-bit budget");
  oracle->add_option("--beta", oo.q.beta, "Neighbour distance");
  oracle->add_option("--norm", oo.q.norm, "Data norm");
  oracle->add_option("--delta", oo.q.delta, "Failure probability");

  std::vector<std::string> argv_store = {"dprp"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    const auto subs = app.get_subcommands();
    out << (subs.empty() ? app.help() : subs.front()->help());
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    const auto subs = app.get_subcommands();
    err << "dprp: error [usage]: " << e.what() << "\n"
        << (subs.empty() ? app.help() : subs.front()->help());
    return kExitValidation;
  }

  const CLI::App* sub = app.get_subcommands().front();
  Run run(sub->get_name(), g, out, log);
  absl::Status status = run.Prepare();
  if (status.ok()) {
    if (sub == calibrate) {
      status = RunCalibrate(cal, run);
    } else if (sub == analytic) {
      status = RunAnalytic(fn_name, params, run);
    } else if (sub == privatize) {
      status = RunPrivatize(po, *privatize, g, run);
    } else if (sub == estimate) {
      status = RunEstimate(est_a, est_b, estimator, run);
    } else if (sub == bench) {
      status = RunBench(g, app.count("--jobs") > 0, run, log);
    } else if (sub == audit) {
      status = RunAuditCommand(ao, g, run);
    } else if (sub == oracle) {
      status = RunOracle(oo, g, run);
    }
  }
  if (status.ok()) status = run.Finish();
  if (!status.ok()) {
    err << "dprp: error [" << StatusCodeName(status.code())
        << "]: " << status.message() << "\n";
  }
  return ExitCodeFor(status);
}

}  // namespace dprp
