#pragma once

// Benchmark harness: builds a problem, runs one solver configuration and
// reports the statistics columns used by the result tables.

#include <trdh/problems.hpp>
#include <trdh/tr.hpp>

#include <json.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace trdh {

enum class SolverKind { R2, TRDH, iTRDH, TR };

inline const char* to_string(SolverKind s) {
  switch (s) {
    case SolverKind::R2: return "R2";
    case SolverKind::TRDH: return "TRDH";
    case SolverKind::iTRDH: return "iTRDH";
    case SolverKind::TR: return "TR";
  }
  return "?";
}

enum class OutputFormat { Table, Csv, Json };

struct RunConfig {
  std::string problem = "bpdn";  // bpdn, bpdn-cstr, nnmf, svm, fh, fh-cstr
  SolverKind solver = SolverKind::TRDH;
  DiagKind diag = DiagKind::Spectral;
  Subsolver subsolver = Subsolver::R2;
  HessianKind hessian = HessianKind::LSR1;
  std::uint64_t seed = 1234;
  SolverOptions options;
  TrustRegionConstants constants;
  /// Problem-specific overrides, e.g. "noise_sd", "x0_scale", "lambda".
  std::map<std::string, double> problem_params;
  /// MNIST directory for svm; unset falls back to TRDH_MNIST_DIR, then to the synthetic fixture.
  std::optional<std::string> mnist_dir;

  std::string solver_label() const {
    switch (solver) {
      case SolverKind::R2: return "R2";
      case SolverKind::TRDH: return std::string("TRDH-") + to_string(diag);
      case SolverKind::iTRDH: return std::string("iTRDH-") + to_string(diag);
      case SolverKind::TR:
        return subsolver == Subsolver::R2 ? "TR-R2"
                                          : std::string("TR-") + to_string(subsolver) + "-" + to_string(diag);
    }
    return "?";
  }
};

struct RunRecord {
  std::string problem;
  std::string solver;
  std::string status;  // first_order, max_iter, stalled, or error:<kind>
  std::string message;
  std::uint64_t seed = 0;
  double f = std::numeric_limits<double>::quiet_NaN();
  double h_over_lambda = std::numeric_limits<double>::quiet_NaN();
  double criticality = std::numeric_limits<double>::quiet_NaN();
  double x_err = std::numeric_limits<double>::quiet_NaN();  // |x - x*|, NaN when unknown
  double train_acc = std::numeric_limits<double>::quiet_NaN();
  double test_acc = std::numeric_limits<double>::quiet_NaN();
  long n_f = 0, n_grad = 0, n_prox = 0, iterations = 0;
  double time_s = 0.0;
  std::vector<double> x;  // final iterate when small (at most 10 entries)

  bool operator==(const RunRecord&) const = default;
};

inline int exit_code(const RunRecord& r) {
  if (r.status == "first_order") return 0;
  if (r.status == "max_iter" || r.status == "stalled") return 2;
  return 1;
}

inline std::optional<DiagKind> parse_diag(const std::string& s) {
  if (s == "Spec" || s == "spec" || s == "Spectral" || s == "spectral") return DiagKind::Spectral;
  if (s == "PSB" || s == "psb") return DiagKind::PSB;
  if (s == "Andrei" || s == "andrei") return DiagKind::Andrei;
  if (s == "None" || s == "none") return DiagKind::None;
  return std::nullopt;
}

inline std::optional<SolverKind> parse_solver(const std::string& s) {
  if (s == "R2" || s == "r2") return SolverKind::R2;
  if (s == "TRDH" || s == "trdh") return SolverKind::TRDH;
  if (s == "iTRDH" || s == "itrdh") return SolverKind::iTRDH;
  if (s == "TR" || s == "tr") return SolverKind::TR;
  return std::nullopt;
}

inline std::optional<Subsolver> parse_subsolver(const std::string& s) {
  if (s == "R2" || s == "r2") return Subsolver::R2;
  if (s == "TRDH" || s == "trdh") return Subsolver::TRDH;
  if (s == "iTRDH" || s == "itrdh") return Subsolver::iTRDH;
  return std::nullopt;
}

inline std::optional<HessianKind> parse_hessian(const std::string& s) {
  if (s == "LSR1" || s == "lsr1") return HessianKind::LSR1;
  if (s == "LBFGS" || s == "lbfgs") return HessianKind::LBFGS;
  return std::nullopt;
}

inline const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names{"bpdn", "bpdn-cstr", "nnmf", "svm", "fh", "fh-cstr"};
  return names;
}

/// Tolerances, caps and Hessian kind used for each experiment family.
inline RunConfig preset(const std::string& name) {
  RunConfig c;
  c.problem = name;
  SolverOptions& o = c.options;
  o.eps_rel_inner = 1e-6;
  o.max_iter = 500;
  o.max_inner_iter = 100;
  if (name == "bpdn" || name == "bpdn-cstr") {
    o.eps_abs = o.eps_rel = 1e-5;
    o.eps_abs_inner = 1e-5;
    c.hessian = HessianKind::LSR1;
  } else if (name == "nnmf") {
    o.eps_abs = o.eps_rel = 1e-5;
    o.eps_abs_inner = 1e-3;
    c.hessian = HessianKind::LSR1;
  } else if (name == "svm") {
    o.eps_abs = o.eps_rel = 1e-4;
    o.eps_abs_inner = 1e-3;
    o.max_iter = 1000;
    c.hessian = HessianKind::LBFGS;
  } else if (name == "fh" || name == "fh-cstr") {
    o.eps_abs = o.eps_rel = 1e-4;
    o.eps_abs_inner = 1e-3;
    o.max_inner_iter = 200;
    c.hessian = HessianKind::LBFGS;
  } else {
    throw ConfigError("preset: unknown problem '" + name + "'");
  }
  return c;
}

/// The 14 solver rows of a results table for one preset.
inline std::vector<RunConfig> table_configs(const std::string& name, std::uint64_t seed) {
  std::vector<RunConfig> out;
  auto add = [&](SolverKind s, DiagKind d, Subsolver sub) {
    RunConfig c = preset(name);
    c.seed = seed;
    c.solver = s;
    c.diag = d;
    c.subsolver = sub;
    out.push_back(c);
  };
  const DiagKind kinds[] = {DiagKind::Spectral, DiagKind::PSB, DiagKind::Andrei};
  add(SolverKind::R2, DiagKind::Spectral, Subsolver::R2);
  for (DiagKind d : kinds) {
    add(SolverKind::TRDH, d, Subsolver::R2);
    add(SolverKind::iTRDH, d, Subsolver::R2);
  }
  add(SolverKind::TR, DiagKind::Spectral, Subsolver::R2);
  for (DiagKind d : {DiagKind::PSB, DiagKind::Andrei, DiagKind::Spectral}) {
    add(SolverKind::TR, d, Subsolver::TRDH);
    add(SolverKind::TR, d, Subsolver::iTRDH);
  }
  return out;
}

namespace detail {

inline double param_or(const RunConfig& c, const std::string& key, double fallback) {
  const auto it = c.problem_params.find(key);
  return it == c.problem_params.end() ? fallback : it->second;
}

inline void check_params(const RunConfig& c, std::initializer_list<const char*> allowed) {
  for (const auto& [k, v] : c.problem_params) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError("problem '" + c.problem + "' has no parameter '" + k + "'");
  }
}

}  // namespace detail

struct BuiltProblem {
  RegularizedProblem problem;
  std::shared_ptr<const SvmData> svm_train, svm_test;
};

inline BuiltProblem build_problem(const RunConfig& c) {
  BuiltProblem out;
  if (c.problem == "bpdn" || c.problem == "bpdn-cstr") {
    detail::check_params(c, {"noise_sd", "m", "n", "k_nnz"});
    BpdnConfig b;
    b.seed = c.seed;
    b.constrained = c.problem == "bpdn-cstr";
    b.noise_sd = detail::param_or(c, "noise_sd", b.noise_sd);
    b.m = Index(detail::param_or(c, "m", double(b.m)));
    b.n = Index(detail::param_or(c, "n", double(b.n)));
    b.k_nnz = Index(detail::param_or(c, "k_nnz", double(b.k_nnz)));
    out.problem = bpdn_problem(b);
  } else if (c.problem == "nnmf") {
    detail::check_params(c, {"lambda", "x0_scale", "cluster_sd"});
    NnmfConfig n;
    n.seed = c.seed;
    n.lambda = detail::param_or(c, "lambda", n.lambda);
    n.x0_scale = detail::param_or(c, "x0_scale", n.x0_scale);
    n.cluster_sd = detail::param_or(c, "cluster_sd", n.cluster_sd);
    out.problem = nnmf_problem(n);
  } else if (c.problem == "svm") {
    detail::check_params(c, {"lambda", "samples"});
    const double lambda = detail::param_or(c, "lambda", 0.1);
    std::optional<std::string> dir = c.mnist_dir ? c.mnist_dir : mnist_dir_from_env();
    SvmInstance inst = dir ? load_mnist_svm(*dir, lambda)
                           : synthetic_svm(std::uint32_t(detail::param_or(c, "samples", 500)), c.seed, lambda);
    out.problem = std::move(inst.problem);
    out.svm_train = inst.train;
    out.svm_test = inst.test;
  } else if (c.problem == "fh" || c.problem == "fh-cstr") {
    detail::check_params(c, {"lambda", "substeps"});
    FhConfig f;
    f.constrained = c.problem == "fh-cstr";
    f.lambda = detail::param_or(c, "lambda", f.constrained ? 40.0 : 10.0);
    f.substeps = int(detail::param_or(c, "substeps", f.substeps));
    out.problem = fh_problem(f);
  } else {
    throw ConfigError("unknown problem '" + c.problem + "'");
  }
  return out;
}

inline SolveResult run_solver(const RunConfig& c, const RegularizedProblem& p) {
  SolverOptions o = c.options;
  o.diag_kind = c.diag;
  switch (c.solver) {
    case SolverKind::R2: return r2_solve(p, o, c.constants);
    case SolverKind::TRDH: return trdh_solve(p, o, c.constants);
    case SolverKind::iTRDH: return itrdh_solve(p, o, c.constants);
    case SolverKind::TR:
      return tr_solve(p, {.base = o, .subsolver = c.subsolver, .hessian = c.hessian}, c.constants);
  }
  throw ConfigError("unknown solver");
}

/// Never throws for solver or problem failures; they become error rows.
inline RunRecord run(const RunConfig& c) {
  RunRecord r;
  r.problem = c.problem;
  r.solver = c.solver_label();
  r.seed = c.seed;
  try {
    const BuiltProblem bp = build_problem(c);
    r.problem = bp.problem.name;
    const SolveResult res = run_solver(c, bp.problem);
    const SolverStats& st = res.stats;
    r.status = to_string(st.status);
    r.f = st.final_f;
    r.h_over_lambda = st.final_h_over_lambda;
    r.criticality = st.final_criticality;
    if (bp.problem.x_star) r.x_err = (res.x - *bp.problem.x_star).norm();
    if (bp.svm_train) r.train_acc = 100.0 * svm_accuracy(*bp.svm_train, res.x);
    if (bp.svm_test) r.test_acc = 100.0 * svm_accuracy(*bp.svm_test, res.x);
    r.n_f = st.n_f;
    r.n_grad = st.n_grad;
    r.n_prox = st.n_prox;
    r.iterations = st.iterations;
    r.time_s = st.time_s;
    if (res.x.size() <= 10) r.x.assign(res.x.data(), res.x.data() + res.x.size());
  } catch (const IoError& e) {
    r.status = "error:io";
    r.message = e.what();
  } catch (const ParseError& e) {
    r.status = "error:parse";
    r.message = e.what();
  } catch (const ConfigError& e) {
    r.status = "error:config";
    r.message = e.what();
  } catch (const std::exception& e) {
    r.status = "error:numerical";
    r.message = e.what();
  }
  return r;
}

/// Runs independent configurations on up to `jobs` threads; rows keep input order.
inline std::vector<RunRecord> run_suite(const std::vector<RunConfig>& configs, unsigned jobs = 1) {
  if (configs.empty()) throw ConfigError("run_suite: no configurations");
  std::vector<RunRecord> rows(configs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < configs.size(); i = next++) rows[i] = run(configs[i]);
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, unsigned(configs.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return rows;
}

// ---- serialization ----

inline nlohmann::json to_json(const RunRecord& r) {
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  return {{"problem", r.problem},       {"solver", r.solver},
          {"status", r.status},         {"message", r.message},
          {"seed", r.seed},             {"f", num(r.f)},
          {"h_over_lambda", num(r.h_over_lambda)}, {"criticality", num(r.criticality)},
          {"x_err", num(r.x_err)},      {"train_acc", num(r.train_acc)},
          {"test_acc", num(r.test_acc)}, {"n_f", r.n_f},
          {"n_grad", r.n_grad},         {"n_prox", r.n_prox},
          {"iterations", r.iterations}, {"time_s", r.time_s},
          {"x", r.x}};
}

inline RunRecord record_from_json(const nlohmann::json& j) {
  auto num = [&](const char* k) {
    return j.at(k).is_null() ? std::numeric_limits<double>::quiet_NaN() : j.at(k).get<double>();
  };
  RunRecord r;
  r.problem = j.at("problem").get<std::string>();
  r.solver = j.at("solver").get<std::string>();
  r.status = j.at("status").get<std::string>();
  r.message = j.at("message").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.f = num("f");
  r.h_over_lambda = num("h_over_lambda");
  r.criticality = num("criticality");
  r.x_err = num("x_err");
  r.train_acc = num("train_acc");
  r.test_acc = num("test_acc");
  r.n_f = j.at("n_f").get<long>();
  r.n_grad = j.at("n_grad").get<long>();
  r.n_prox = j.at("n_prox").get<long>();
  r.iterations = j.at("iterations").get<long>();
  r.time_s = j.at("time_s").get<double>();
  r.x = j.at("x").get<std::vector<double>>();
  return r;
}

inline nlohmann::json config_json(const RunConfig& c) {
  nlohmann::json j{{"problem", c.problem},
                   {"solver", c.solver_label()},
                   {"hessian", to_string(c.hessian)},
                   {"seed", c.seed},
                   {"problem_params", c.problem_params}};
  SolverStats tmp;
  detail::record_constants(tmp, c.options, c.constants);
  for (const auto& [k, v] : tmp.metadata) j["constants"][k] = v;
  j["norm_estimate"] = c.options.norm_estimate == NormEstimate::Power ? "power" : "bound";
  if (c.mnist_dir) j["mnist_dir"] = *c.mnist_dir;
  return j;
}

/// 64-bit FNV-1a of the canonical JSON form of the configuration.
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(c).dump()) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

inline const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{
      "problem", "solver", "status", "seed", "f", "h_over_lambda", "criticality", "x_err",
      "train_acc", "test_acc", "n_f", "n_grad", "n_prox", "iterations", "time_s", "message"};
  return cols;
}

namespace detail {

inline std::string fmt_full(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return out + "\"";
}

inline std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace detail

inline std::string csv_header() {
  std::string s;
  for (const auto& c : csv_columns()) s += (s.empty() ? "" : ",") + c;
  return s;
}

inline std::string to_csv_row(const RunRecord& r) {
  using detail::fmt_full;
  const std::vector<std::string> cells{
      detail::csv_escape(r.problem), detail::csv_escape(r.solver), r.status, std::to_string(r.seed),
      fmt_full(r.f), fmt_full(r.h_over_lambda), fmt_full(r.criticality), fmt_full(r.x_err),
      fmt_full(r.train_acc), fmt_full(r.test_acc), std::to_string(r.n_f), std::to_string(r.n_grad),
      std::to_string(r.n_prox), std::to_string(r.iterations), fmt_full(r.time_s),
      detail::csv_escape(r.message)};
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
  return s;
}

/// Inverse of to_csv_row, except for the final iterate which CSV omits.
inline RunRecord record_from_csv(const std::string& line) {
  const auto c = detail::csv_split(line);
  if (c.size() != csv_columns().size()) throw ParseError("csv: wrong column count", 0);
  // strtod rather than stod: stod rejects subnormals such as 5e-324.
  auto num = [](const std::string& s) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("csv: not a number: '" + s + "'", 0);
    return v;
  };
  RunRecord r;
  r.problem = c[0];
  r.solver = c[1];
  r.status = c[2];
  r.seed = std::stoull(c[3]);
  r.f = num(c[4]);
  r.h_over_lambda = num(c[5]);
  r.criticality = num(c[6]);
  r.x_err = num(c[7]);
  r.train_acc = num(c[8]);
  r.test_acc = num(c[9]);
  r.n_f = std::stol(c[10]);
  r.n_grad = std::stol(c[11]);
  r.n_prox = std::stol(c[12]);
  r.iterations = std::stol(c[13]);
  r.time_s = num(c[14]);
  r.message = c[15];
  return r;
}

namespace detail {

inline std::string sci(double v, int digits) {
  if (std::isnan(v)) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*e", digits, v);
  return buf;
}

}  // namespace detail

/// Human-readable table in the layout of the published result tables.
inline std::string format_table(const std::vector<RunRecord>& rows) {
  bool acc = false;
  for (const auto& r : rows) acc = acc || !std::isnan(r.train_acc);
  std::ostringstream os;
  char line[512];
  std::snprintf(line, sizeof line, "%-16s %10s %9s %9s %15s %6s %6s %7s %9s  %s\n", "solver", "f(x)",
                "h(x)/lam", "sqrt(xi/nu)", acc ? "(train, test)" : "|x-x*|", "#f", "#grad", "#prox", "t(s)",
                "status");
  os << line;
  for (const auto& r : rows) {
    std::string col4;
    if (acc) {
      char b[32];
      std::snprintf(b, sizeof b, "(%.1f, %.1f)", r.train_acc, r.test_acc);
      col4 = b;
    } else {
      col4 = detail::sci(r.x_err, 1);
    }
    const std::string hl = r.h_over_lambda == std::round(r.h_over_lambda)
                               ? (std::isnan(r.h_over_lambda) ? "-" : std::to_string(long(r.h_over_lambda)))
                               : detail::sci(r.h_over_lambda, 1);
    std::snprintf(line, sizeof line, "%-16s %10s %9s %11s %15s %6ld %6ld %7ld %9s  %s\n", r.solver.c_str(),
                  detail::sci(r.f, 2).c_str(), hl.c_str(), detail::sci(r.criticality, 1).c_str(), col4.c_str(),
                  r.n_f, r.n_grad, r.n_prox, detail::sci(r.time_s, 1).c_str(),
                  (r.status + (r.message.empty() ? "" : " (" + r.message + ")")).c_str());
    os << line;
  }
  return os.str();
}

inline std::string format_rows(const std::vector<RunRecord>& rows, const std::vector<RunConfig>& configs,
                               OutputFormat fmt) {
  switch (fmt) {
    case OutputFormat::Table: return format_table(rows);
    case OutputFormat::Csv: {
      std::string s = csv_header() + "\n";
      for (const auto& r : rows) s += to_csv_row(r) + "\n";
      return s;
    }
    case OutputFormat::Json: {
      nlohmann::json j;
      j["rows"] = nlohmann::json::array();
      for (const auto& r : rows) j["rows"].push_back(to_json(r));
      j["metadata"] = nlohmann::json::array();
      for (const auto& c : configs) {
        nlohmann::json m = config_json(c);
        m["config_hash"] = config_hash(c);
        j["metadata"].push_back(m);
      }
      return j.dump(2) + "\n";
    }
  }
  return {};
}

}  // namespace trdh
