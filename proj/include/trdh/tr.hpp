#pragma once

// TR: trust-region method on a limited-memory quadratic model, with each
// subproblem solved inexactly by R2, TRDH or iTRDH.

#include <trdh/lm_qn.hpp>
#include <trdh/r2.hpp>
#include <trdh/trdh.hpp>

namespace trdh {

enum class Subsolver { R2, TRDH, iTRDH };

inline const char* to_string(Subsolver s) {
  switch (s) {
    case Subsolver::R2: return "R2";
    case Subsolver::TRDH: return "TRDH";
    case Subsolver::iTRDH: return "iTRDH";
  }
  return "?";
}

struct TrOptions {
  SolverOptions base;
  Subsolver subsolver = Subsolver::R2;
  HessianKind hessian = HessianKind::LSR1;
  int memory = 5;
};

inline SolveResult tr_solve(const RegularizedProblem& p, const TrOptions& to = {},
                            const TrustRegionConstants& c = {}) {
  const SolverOptions& o = to.base;
  p.validate();
  o.validate();
  c.validate();
  detail::Stopwatch clock;
  detail::Evaluator ev(p);
  SolveResult res;
  SolverStats& st = res.stats;
  st.solver = std::string("TR-") + to_string(to.subsolver) +
              (to.subsolver == Subsolver::R2 ? "" : std::string("-") + to_string(o.diag_kind));
  detail::record_constants(st, o, c);
  st.metadata.emplace_back("memory", to.memory);
  st.metadata.emplace_back("norm_power",
                           o.norm_estimate == NormEstimate::Power ? o.power_iterations : 0);

  Vector x = p.x0;
  double fx = ev.f(x);
  if (!std::isfinite(fx)) throw NumericalError(p.name + ": objective is not finite at x0");
  double hx = ev.h(x);
  Vector g = ev.grad(x);
  LimitedMemoryOp B(p.dim(), to.hessian, {.memory = to.memory});
  double delta = o.delta0;
  double threshold = 0.0, crit = 0.0;
  st.status = SolverStatus::MaxIter;

  for (long k = 0; k < o.max_iter; ++k) {
    if (delta < detail::kStallRadius) {
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

    const double b_norm =
        o.norm_estimate == NormEstimate::Power ? B.norm_power(o.power_iterations) : B.norm_bound();
    const double nu = 1.0 / (b_norm + 1.0 / (c.alpha * delta));
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

    // Subproblem in absolute coordinates: the model box is the outer box
    // intersected with the inner radius around x. It starts from x + s_{k,1}
    // so that the step never does worse than the first prox step.
    const double radius = std::min(delta, c.beta * inf_norm(first.s1));
    rec.step_radius = radius;
    const Vector lo = p.reg.lower().cwiseMax((x.array() - radius).matrix());
    const Vector hi = p.reg.upper().cwiseMin((x.array() + radius).matrix());
    RegularizedProblem sub;
    sub.name = p.name + "/model";
    sub.f = [&](const Vector& y) {
      const Vector s = y - x;
      return g.dot(s) + 0.5 * s.dot(B.apply(s));
    };
    sub.grad = [&](const Vector& y) { return Vector(g + B.apply(y - x)); };
    sub.reg = p.reg.with_bounds(lo, hi);
    sub.x0 = first.x_trial;

    SolverOptions io = o;
    io.callback = nullptr;
    io.eps_abs = k == 0 ? 1e-5 : std::max(o.eps_abs_inner, std::min(1e-2, crit));
    io.eps_rel = o.eps_rel_inner;
    io.max_iter = o.max_inner_iter;
    SolveResult inner;
    bool solved = true;
    try {
      if (to.subsolver == Subsolver::R2) {
        io.nu0 = nu;
        inner = r2_solve(sub, io, c);
      } else {
        io.delta0 = radius / 10.0;
        io.d0 = o.diag_kind == DiagKind::Spectral ? Vector::Constant(p.dim(), 1.0 / nu)
                                                  : B.extract_diagonal();
        inner = to.subsolver == Subsolver::TRDH ? trdh_solve(sub, io, c) : itrdh_solve(sub, io, c);
      }
    } catch (const NumericalError&) {
      solved = false;
    }
    st.n_prox += inner.stats.n_prox;

    const Vector x_trial = solved ? p.reg.project(inner.x) : x;
    const Vector s = x_trial - x;
    const double h_new = ev.h(x_trial);
    const double lin = g.dot(s), quad = 0.5 * s.dot(B.apply(s));
    const double xi =
        detail::clean_decrease(hx - lin - quad - h_new, std::abs(hx) + std::abs(lin) + std::abs(quad));
    rec.xi = xi;
    rec.step_inf = inf_norm(s);

    double r = -kInf, f_new = kInf;
    if (xi > 0.0) {
      f_new = ev.f(x_trial);
      r = std::isfinite(f_new) ? rho(fx, hx, f_new, h_new, xi) : -kInf;
    }
    rec.rho = r;
    rec.accepted = r >= c.eta1;
    if (rec.accepted) {
      Vector g_new = ev.grad(x_trial);
      B.update({s, g_new - g});
      x = x_trial;
      g = std::move(g_new);
      fx = f_new;
      hx = h_new;
    }
    delta = radius_update(delta, r, c);
    rec.delta_next = delta;
    if (o.callback) o.callback(rec);
  }

  res.x = x;
  detail::finish_stats(st, ev, x, fx, hx, crit, clock);
  return res;
}

}  // namespace trdh
