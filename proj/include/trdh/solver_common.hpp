#pragma once

// Types and per-iteration building blocks shared by R2, TRDH, iTRDH and TR.

#include <trdh/core.hpp>
#include <trdh/diag_qn.hpp>
#include <trdh/problem.hpp>
#include <trdh/prox.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace trdh {

/// Acceptance thresholds, radius factors and step-size constants.
/// Must satisfy 0 < eta1 <= eta2 < 1, 0 < 1/gamma3 <= gamma1 <= gamma2 < 1 < gamma3 <= gamma4,
/// alpha > 0 and beta >= 1.
struct TrustRegionConstants {
  double eta1 = 1e-3;
  double eta2 = 0.75;
  double gamma1 = 0.5;
  double gamma2 = 0.9;
  double gamma3 = 2.0;
  double gamma4 = 4.0;
  double alpha = 100.0;
  double beta = 10.0;

  void validate() const {
    if (!(0.0 < eta1 && eta1 <= eta2 && eta2 < 1.0))
      throw ConfigError("constants: need 0 < eta1 <= eta2 < 1");
    if (!(0.0 < 1.0 / gamma3 && 1.0 / gamma3 <= gamma1 && gamma1 <= gamma2 && gamma2 < 1.0 &&
          1.0 < gamma3 && gamma3 <= gamma4))
      throw ConfigError("constants: need 0 < 1/gamma3 <= gamma1 <= gamma2 < 1 < gamma3 <= gamma4");
    if (!(alpha > 0.0)) throw ConfigError("constants: alpha must be positive");
    if (!(beta >= 1.0)) throw ConfigError("constants: beta must be >= 1");
  }
};

/// How TR estimates |B_k| when choosing nu_k.
enum class NormEstimate { Bound, Power };

enum class SolverStatus { FirstOrder, MaxIter, Stalled };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::FirstOrder: return "first_order";
    case SolverStatus::MaxIter: return "max_iter";
    case SolverStatus::Stalled: return "stalled";
  }
  return "?";
}

/// What one pass of a solver loop saw. Passed to the optional callback.
struct IterationRecord {
  long k = 0;
  const Vector* x = nullptr;  // iterate at the start of the pass
  double f = 0.0;
  double h = 0.0;
  double criticality = 0.0;  // sqrt(xi / nu) used by the stopping test
  double nu = 0.0;
  double delta = 0.0;        // radius at the start of the pass (R2: +inf)
  double delta_next = 0.0;
  double xi_cp = 0.0;        // decrease of the nu-model (TRDH, TR, R2)
  double s1_norm = 0.0;      // |s_{k,1}|_2 (TRDH, TR)
  double xi = 0.0;           // decrease of the D-model (denominator of rho)
  double step_inf = 0.0;     // |s_k|_inf
  double step_radius = 0.0;  // bound that |s_k|_inf must respect
  double rho = 0.0;
  bool accepted = false;
  bool terminal = false;     // stopping test fired; no step taken
};

using IterationCallback = std::function<void(const IterationRecord&)>;

struct SolverOptions {
  double eps_abs = 1e-5;
  double eps_rel = 1e-5;
  double eps_abs_inner = 1e-3;
  double eps_rel_inner = 1e-6;
  double nu0 = 1.0;
  double delta0 = 1.0;
  long max_iter = 500;
  long max_inner_iter = 100;
  double d_max = 1e15;
  DiagKind diag_kind = DiagKind::Spectral;
  NormEstimate norm_estimate = NormEstimate::Power;
  int power_iterations = 20;
  double sigma_min = 1e-8;
  /// Initial diagonal; empty means nu0^{-1} * 1.
  Vector d0;
  IterationCallback callback;

  void validate() const {
    for (double v : {eps_abs, eps_rel, eps_abs_inner, eps_rel_inner, nu0, delta0, d_max, sigma_min})
      if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError("options: tolerances and scales must be positive");
    if (max_iter <= 0 || max_inner_iter <= 0) throw ConfigError("options: iteration caps must be positive");
    if (power_iterations <= 0) throw ConfigError("options: power_iterations must be positive");
  }
};

struct SolverStats {
  long n_f = 0;
  long n_grad = 0;
  long n_prox = 0;
  long iterations = 0;
  double final_f = 0.0;
  double final_h = 0.0;
  double final_h_over_lambda = 0.0;
  double final_criticality = 0.0;
  double time_s = 0.0;
  SolverStatus status = SolverStatus::MaxIter;
  std::string solver;
  /// Every constant the run used, for the run manifest.
  std::vector<std::pair<std::string, double>> metadata;
};

struct SolveResult {
  Vector x;
  SolverStats stats;
};

/// nu_k = 1 / (|d|_inf + 1/(alpha * delta)).
inline double compute_nu_trdh(const Vector& d, double delta, double alpha) {
  if (!(delta > 0.0) || !(alpha > 0.0)) throw InvalidArgument("compute_nu_trdh: delta, alpha > 0");
  return 1.0 / (inf_norm(d) + 1.0 / (alpha * delta));
}

/// nu_k = 1 / (|d|_inf + 1/alpha).
inline double compute_nu_itrdh(const Vector& d, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("compute_nu_itrdh: alpha > 0");
  return 1.0 / (inf_norm(d) + 1.0 / alpha);
}

/// sqrt(xi / nu); rounding-level negative xi counts as zero.
inline double criticality(double nu, double xi) {
  if (!(nu > 0.0)) throw InvalidArgument("criticality: nu must be positive");
  if (xi < -1e-12) throw NumericalError("criticality: negative model decrease " + std::to_string(xi));
  return std::sqrt(std::max(xi, 0.0) / nu);
}

/// Actual over predicted decrease.
inline double rho(double fx, double hx, double fx_new, double hx_new, double model_decrease) {
  if (!(model_decrease > 0.0)) throw NumericalError("rho: non-positive model decrease");
  return (fx + hx - fx_new - hx_new) / model_decrease;
}

/// Very successful: gamma3*delta; successful: delta; unsuccessful: gamma2*delta.
inline double radius_update(double delta, double rho_val, const TrustRegionConstants& c) {
  if (!(delta > 0.0)) throw InvalidArgument("radius_update: delta must be positive");
  if (rho_val >= c.eta2) return c.gamma3 * delta;
  if (rho_val >= c.eta1) return delta;
  return c.gamma2 * delta;
}

namespace detail {

// Model decrease xi with rounding-level negatives mapped to zero; anything
// clearly negative means the subproblem was not solved.
inline double clean_decrease(double xi, double scale) {
  if (xi >= 0.0) return xi;
  if (xi > -1e-12 * (1.0 + scale)) return 0.0;
  throw NumericalError("model decrease is negative: " + std::to_string(xi));
}

/// Counting wrapper around the problem callbacks.
class Evaluator {
 public:
  explicit Evaluator(const RegularizedProblem& p) : p_(p) {}

  double f(const Vector& x) {
    ++n_f;
    const double v = p_.f(x);
    return std::isfinite(v) ? v : kInf;
  }
  Vector grad(const Vector& x) {
    ++n_grad;
    return p_.grad(x);
  }
  double h(const Vector& x) const { return p_.reg.value(x); }
  const BoxedSeparableRegularizer& reg() const { return p_.reg; }

  long n_f = 0;
  long n_grad = 0;

 private:
  const RegularizedProblem& p_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

 private:
  std::chrono::steady_clock::time_point t0_ = std::chrono::steady_clock::now();
};

inline void finish_stats(SolverStats& st, const Evaluator& ev, const Vector& x, double f, double h,
                         double crit, const Stopwatch& clock) {
  st.n_f = ev.n_f;
  st.n_grad = ev.n_grad;
  st.final_f = f;
  st.final_h = h;
  st.final_h_over_lambda = ev.reg().measure(x);
  st.final_criticality = crit;
  st.time_s = clock.seconds();
}

inline void record_constants(SolverStats& st, const SolverOptions& o, const TrustRegionConstants& c) {
  st.metadata = {{"eta1", c.eta1},       {"eta2", c.eta2},         {"gamma1", c.gamma1},
                 {"gamma2", c.gamma2},   {"gamma3", c.gamma3},     {"gamma4", c.gamma4},
                 {"alpha", c.alpha},     {"beta", c.beta},         {"eps_abs", o.eps_abs},
                 {"eps_rel", o.eps_rel}, {"eps_abs_inner", o.eps_abs_inner},
                 {"eps_rel_inner", o.eps_rel_inner}, {"nu0", o.nu0}, {"delta0", o.delta0},
                 {"max_iter", static_cast<double>(o.max_iter)},
                 {"max_inner_iter", static_cast<double>(o.max_inner_iter)},
                 {"d_max", o.d_max}, {"sigma_min", o.sigma_min}};
}

inline constexpr double kStallRadius = 1e-16;

}  // namespace detail

struct FirstStep {
  Vector s1;
  Vector x_trial;  // x + s1 inside the bounds
  double xi_cp = 0.0;
};

/// s_{k,1}: iprox step of the nu-model  g's + |s|^2/(2 nu) + h(x + s)  within
/// the bounds and the radius, and xi_cp = h(x) - g's_1 - h(x + s_1).
inline FirstStep first_prox_step(const Vector& x, const Vector& g, double hx, double nu, double delta,
                                 const BoxedSeparableRegularizer& reg) {
  FirstStep out;
  out.s1 = iprox_step(g, Vector::Constant(x.size(), 1.0 / nu), x, delta, reg);
  out.x_trial = apply_step(x, out.s1, reg);
  const double gs = g.dot(out.s1);
  const double h1 = reg.value(out.x_trial);
  out.xi_cp = detail::clean_decrease(hx - gs - h1, std::abs(hx) + std::abs(gs));
  return out;
}

/// s_k: iprox step of the D-model within radius min(delta, beta |s1|_inf).
inline Vector second_step(const Vector& x, const Vector& g, const Vector& d, double delta,
                          const Vector& s1, double beta, const BoxedSeparableRegularizer& reg) {
  return iprox_step(g, d, x, std::min(delta, beta * inf_norm(s1)), reg);
}

/// h(x) - (g's + s'Ds/2 + h(x + s)) for a diagonal D.
inline double diagonal_model_decrease(const Vector& g, const Vector& d, const Vector& s, double hx,
                                      double h_new) {
  const double lin = g.dot(s);
  const double quad = 0.5 * s.cwiseAbs2().dot(d);
  return detail::clean_decrease(hx - lin - quad - h_new, std::abs(hx) + std::abs(lin) + std::abs(quad));
}

}  // namespace trdh
