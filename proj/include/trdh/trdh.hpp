#pragma once

// TRDH and iTRDH: trust-region methods whose model is f plus a diagonal
// quadratic, solved in closed form by the indefinite prox.

#include <trdh/solver_common.hpp>

namespace trdh {

namespace detail {

inline SolveResult diagonal_tr_solve(const RegularizedProblem& p, const SolverOptions& o,
                                     const TrustRegionConstants& c, bool two_step) {
  p.validate();
  o.validate();
  c.validate();
  if (o.d0.size() != 0 && o.d0.size() != p.dim()) throw ConfigError("options: d0 dimension mismatch");
  Stopwatch clock;
  Evaluator ev(p);
  SolveResult res;
  SolverStats& st = res.stats;
  st.solver = std::string(two_step ? "TRDH-" : "iTRDH-") + to_string(o.diag_kind);
  record_constants(st, o, c);

  Vector x = p.x0;
  double fx = ev.f(x);
  if (!std::isfinite(fx)) throw NumericalError(p.name + ": objective is not finite at x0");
  double hx = ev.h(x);
  Vector g = ev.grad(x);
  DiagonalModel model{o.d0.size() ? clip(o.d0, o.d_max) : Vector::Constant(p.dim(), 1.0 / o.nu0),
                      o.d_max};
  double delta = o.delta0;
  double threshold = 0.0, crit = 0.0;
  st.status = SolverStatus::MaxIter;

  for (long k = 0; k < o.max_iter; ++k) {
    if (delta < kStallRadius) {
      st.status = SolverStatus::Stalled;
      break;
    }
    ++st.iterations;
    IterationRecord rec;
    rec.k = k;
    rec.x = &x;
    rec.f = fx;
    rec.h = hx;
    rec.delta = delta;

    Vector s, x_trial;
    double xi = 0.0;
    if (two_step) {
      const double nu = compute_nu_trdh(model.d, delta, c.alpha);
      const FirstStep first = first_prox_step(x, g, hx, nu, delta, p.reg);
      ++st.n_prox;
      crit = criticality(nu, first.xi_cp);
      rec.nu = nu;
      rec.xi_cp = first.xi_cp;
      rec.s1_norm = first.s1.norm();
      rec.criticality = crit;
      if (k == 0) threshold = o.eps_abs + o.eps_rel * crit;
      if (crit < threshold) {
        st.status = SolverStatus::FirstOrder;
        rec.terminal = true;
        rec.delta_next = delta;
        if (o.callback) o.callback(rec);
        break;
      }
      rec.step_radius = std::min(delta, c.beta * inf_norm(first.s1));
      s = second_step(x, g, model.d, delta, first.s1, c.beta, p.reg);
      ++st.n_prox;
      x_trial = apply_step(x, s, p.reg);
      xi = diagonal_model_decrease(g, model.d, s, hx, ev.h(x_trial));
    } else {
      const double nu = compute_nu_itrdh(model.d, c.alpha);
      s = iprox_step(g, model.d, x, delta, p.reg);
      ++st.n_prox;
      x_trial = apply_step(x, s, p.reg);
      xi = diagonal_model_decrease(g, model.d, s, hx, ev.h(x_trial));
      crit = criticality(nu, xi);
      rec.nu = nu;
      rec.criticality = crit;
      rec.step_radius = delta;
      if (k == 0) threshold = o.eps_abs + o.eps_rel * crit;
      if (crit < threshold) {
        st.status = SolverStatus::FirstOrder;
        rec.terminal = true;
        rec.xi = xi;
        rec.delta_next = delta;
        if (o.callback) o.callback(rec);
        break;
      }
    }
    rec.xi = xi;
    rec.step_inf = inf_norm(s);

    double r = -kInf, f_new = kInf, h_new = 0.0;
    if (xi > 0.0) {
      f_new = ev.f(x_trial);
      h_new = ev.h(x_trial);
      r = std::isfinite(f_new) ? rho(fx, hx, f_new, h_new, xi) : -kInf;
    }
    rec.rho = r;
    rec.accepted = r >= c.eta1;
    if (rec.accepted) {
      Vector g_new = ev.grad(x_trial);
      update_diagonal(model, o.diag_kind, {x_trial - x, g_new - g}, x.norm());
      x = std::move(x_trial);
      g = std::move(g_new);
      fx = f_new;
      hx = h_new;
    }
    delta = radius_update(delta, r, c);
    rec.delta_next = delta;
    if (o.callback) o.callback(rec);
  }

  res.x = x;
  finish_stats(st, ev, x, fx, hx, crit, clock);
  return res;
}

}  // namespace detail

inline SolveResult trdh_solve(const RegularizedProblem& p, const SolverOptions& o = {},
                              const TrustRegionConstants& c = {}) {
  return detail::diagonal_tr_solve(p, o, c, true);
}

inline SolveResult itrdh_solve(const RegularizedProblem& p, const SolverOptions& o = {},
                               const TrustRegionConstants& c = {}) {
  return detail::diagonal_tr_solve(p, o, c, false);
}

}  // namespace trdh
