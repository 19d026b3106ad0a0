#pragma once

// R2: proximal gradient with an adaptive quadratic regularization sigma = 1/nu.

#include <trdh/solver_common.hpp>

namespace trdh {

inline SolveResult r2_solve(const RegularizedProblem& p, const SolverOptions& o = {},
                            const TrustRegionConstants& c = {}) {
  p.validate();
  o.validate();
  c.validate();
  detail::Stopwatch clock;
  detail::Evaluator ev(p);
  SolveResult res;
  SolverStats& st = res.stats;
  st.solver = "R2";
  detail::record_constants(st, o, c);

  Vector x = p.x0;
  double fx = ev.f(x);
  if (!std::isfinite(fx)) throw NumericalError(p.name + ": objective is not finite at x0");
  double hx = ev.h(x);
  Vector g = ev.grad(x);
  double sigma = 1.0 / o.nu0;
  double threshold = 0.0, crit = 0.0;
  st.status = SolverStatus::MaxIter;

  for (long k = 0; k < o.max_iter; ++k) {
    ++st.iterations;
    const double nu = 1.0 / sigma;
    IterationRecord rec;
    rec.k = k;
    rec.x = &x;
    rec.f = fx;
    rec.h = hx;
    rec.nu = nu;
    rec.delta = kInf;

    const FirstStep step = first_prox_step(x, g, hx, nu, kInf, p.reg);
    ++st.n_prox;
    crit = criticality(nu, step.xi_cp);
    if (k == 0) threshold = o.eps_abs + o.eps_rel * crit;
    rec.criticality = crit;
    rec.xi_cp = rec.xi = step.xi_cp;
    rec.s1_norm = step.s1.norm();
    rec.step_inf = inf_norm(step.s1);
    rec.step_radius = kInf;
    if (crit < threshold) {
      st.status = SolverStatus::FirstOrder;
      rec.terminal = true;
      rec.delta_next = kInf;
      if (o.callback) o.callback(rec);
      break;
    }

    double r = -kInf;
    double f_new = kInf, h_new = 0.0;
    if (step.xi_cp > 0.0) {
      f_new = ev.f(step.x_trial);
      h_new = ev.h(step.x_trial);
      r = std::isfinite(f_new) ? rho(fx, hx, f_new, h_new, step.xi_cp) : -kInf;
    }
    rec.rho = r;
    rec.accepted = r >= c.eta1;
    if (rec.accepted) {
      x = step.x_trial;
      fx = f_new;
      hx = h_new;
      g = ev.grad(x);
    }
    if (r >= c.eta2)
      sigma = std::max(c.gamma2 * sigma, o.sigma_min);
    else if (r < c.eta1)
      sigma *= c.gamma3;
    rec.delta_next = kInf;
    if (o.callback) o.callback(rec);
  }

  res.x = x;
  detail::finish_stats(st, ev, x, fx, hx, crit, clock);
  return res;
}

}  // namespace trdh
