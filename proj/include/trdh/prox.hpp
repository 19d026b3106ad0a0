#pragma once

// Indefinite proximal operators of separable l0 / l1 regularizers restricted
// to a box. The quadratic coefficient of each scalar subproblem may have any
// sign; every kernel returns one global minimizer.

#include <trdh/core.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace trdh {

enum class NormKind { Zero, One };

inline const char* to_string(NormKind k) { return k == NormKind::Zero ? "l0" : "l1"; }

/// h(x) = lambda * sum_i w_i |x_i|_p with p in {0, 1}, plus the box [lower, upper].
///
/// `active` masks components out of the penalty (w_i = 0) while keeping them
/// boxed; an empty mask means every component is penalized.
class BoxedSeparableRegularizer {
 public:
  BoxedSeparableRegularizer() = default;

  BoxedSeparableRegularizer(NormKind kind, double lambda, Vector lower, Vector upper,
                            std::vector<bool> active = {})
      : kind_(kind), lambda_(lambda), lower_(std::move(lower)), upper_(std::move(upper)),
        active_(std::move(active)) {
    if (!(lambda_ >= 0.0) || !std::isfinite(lambda_))
      throw InvalidArgument("regularizer: lambda must be finite and nonnegative");
    if (lower_.size() != upper_.size())
      throw InvalidArgument("regularizer: lower and upper bounds differ in length");
    if (!active_.empty() && static_cast<Index>(active_.size()) != lower_.size())
      throw InvalidArgument("regularizer: active mask has the wrong length");
    for (Index i = 0; i < lower_.size(); ++i) {
      if (std::isnan(lower_(i)) || std::isnan(upper_(i)) || lower_(i) == kInf ||
          upper_(i) == -kInf)
        throw InvalidArgument("regularizer: invalid bound at index " + std::to_string(i));
      if (lower_(i) > upper_(i))
        throw InvalidArgument("regularizer: lower > upper at index " + std::to_string(i));
    }
  }

  static BoxedSeparableRegularizer unbounded(NormKind kind, double lambda, Index n) {
    return {kind, lambda, Vector::Constant(n, -kInf), Vector::Constant(n, kInf)};
  }

  NormKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  const std::vector<bool>& active() const { return active_; }
  Index size() const { return lower_.size(); }

  bool is_active(Index i) const { return active_.empty() || active_[static_cast<std::size_t>(i)]; }
  double weight(Index i) const { return is_active(i) ? lambda_ : 0.0; }

  /// sum_i w_i |x_i|_p / lambda, i.e. the support size (l0) or l1 norm of the penalized block.
  double measure(const Vector& x) const {
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
      if (!is_active(i)) continue;
      acc += kind_ == NormKind::Zero ? (x(i) != 0.0 ? 1.0 : 0.0) : std::abs(x(i));
    }
    return acc;
  }

  /// h(x) without the box indicator.
  double value(const Vector& x) const { return lambda_ * measure(x); }

  bool contains(const Vector& x) const {
    if (x.size() != size()) return false;
    for (Index i = 0; i < x.size(); ++i)
      if (!(x(i) >= lower_(i) && x(i) <= upper_(i))) return false;
    return true;
  }

  Vector project(const Vector& x) const { return x.cwiseMax(lower_).cwiseMin(upper_); }

  BoxedSeparableRegularizer with_bounds(Vector lower, Vector upper) const {
    return {kind_, lambda_, std::move(lower), std::move(upper), active_};
  }

 private:
  NormKind kind_ = NormKind::One;
  double lambda_ = 0.0;
  Vector lower_;
  Vector upper_;
  std::vector<bool> active_;
};

/// Linear coefficient, diagonal and compact box of one iprox evaluation.
struct IproxQuery {
  Vector g;
  Vector d;
  Vector box_lower;
  Vector box_upper;
};

namespace detail {

// Coefficients below this magnitude are treated as exactly zero.
inline constexpr double kZeroCurvature = 1e-300;

inline double effective_curvature(double delta) {
  return std::abs(delta) < kZeroCurvature ? 0.0 : delta;
}

// Among equal objective values prefer the candidate whose iprox variable
// (shift + s) is closest to 0, then the smaller one.
inline bool better(double val, double s, double best_val, double best_s, double shift) {
  if (val < best_val) return true;
  if (val > best_val) return false;
  const double a = std::abs(shift + s), b = std::abs(shift + best_s);
  if (a != b) return a < b;
  return s < best_s;
}

template <class Objective, std::size_t N>
double argmin_candidates(const std::array<double, N>& cand, std::size_t count, double shift,
                         Objective&& obj) {
  double best_s = cand[0];
  double best_v = obj(best_s);
  for (std::size_t j = 1; j < count; ++j) {
    const double v = obj(cand[j]);
    if (better(v, cand[j], best_v, best_s, shift)) {
      best_v = v;
      best_s = cand[j];
    }
  }
  return best_s;
}

inline void check_scalar(double g, double delta, double lambda, double shift, double lo, double hi) {
  if (!std::isfinite(g) || !std::isfinite(delta) || !std::isfinite(lambda) || !std::isfinite(shift))
    throw InvalidArgument("iprox: non-finite coefficient");
  if (!(lambda >= 0.0)) throw InvalidArgument("iprox: lambda must be nonnegative");
  if (std::isnan(lo) || std::isnan(hi)) throw InvalidArgument("iprox: NaN bound");
  if (lo > hi) throw InvalidArgument("iprox: lower bound exceeds upper bound");
  if (effective_curvature(delta) <= 0.0 && (!std::isfinite(lo) || !std::isfinite(hi)))
    throw InvalidArgument("iprox: unbounded box requires positive curvature");
}

// argmin_s g s + delta s^2 / 2 + lambda |shift + s|_0  over s in [lo, hi].
// Infinite bounds are allowed when delta > 0.
inline double shifted_l0(double g, double delta, double lambda, double shift, double lo, double hi) {
  check_scalar(g, delta, lambda, shift, lo, hi);
  const double dlt = effective_curvature(delta);
  std::array<double, 4> cand{};
  std::size_t n = 0;
  if (std::isfinite(lo)) cand[n++] = lo;
  if (std::isfinite(hi)) cand[n++] = hi;
  const double zero = -shift;
  if (zero >= lo && zero <= hi) cand[n++] = zero;
  if (dlt > 0.0) {
    const double c = -g / dlt;
    if (c >= lo && c <= hi) cand[n++] = c;
  }
  auto obj = [&](double s) {
    return g * s + 0.5 * dlt * s * s + (shift + s != 0.0 ? lambda : 0.0);
  };
  return argmin_candidates(cand, n, shift, obj);
}

// argmin_s g s + delta s^2 / 2 + lambda |shift + s|  over s in [lo, hi].
inline double shifted_l1(double g, double delta, double lambda, double shift, double lo, double hi) {
  check_scalar(g, delta, lambda, shift, lo, hi);
  const double dlt = effective_curvature(delta);
  if (dlt > 0.0) {
    // Strictly convex: project the unconstrained minimizer of the piecewise quadratic.
    double s;
    const double s_pos = -(g + lambda) / dlt;  // branch shift + s >= 0
    const double s_neg = -(g - lambda) / dlt;  // branch shift + s < 0
    if (shift + s_pos > 0.0)
      s = s_pos;
    else if (shift + s_neg < 0.0)
      s = s_neg;
    else
      s = -shift;
    return std::clamp(s, lo, hi);
  }
  std::array<double, 3> cand{lo, hi, 0.0};
  std::size_t n = 2;
  const double zero = -shift;
  if (zero >= lo && zero <= hi) cand[n++] = zero;
  auto obj = [&](double s) { return g * s + 0.5 * dlt * s * s + lambda * std::abs(shift + s); };
  return argmin_candidates(cand, n, shift, obj);
}

inline double shifted_kernel(NormKind kind, double g, double delta, double lambda, double shift,
                             double lo, double hi) {
  return kind == NormKind::Zero ? shifted_l0(g, delta, lambda, shift, lo, hi)
                                : shifted_l1(g, delta, lambda, shift, lo, hi);
}

inline void check_finite_box(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("iprox: box bounds must be finite");
}

}  // namespace detail

/// Global minimizer of g x + delta x^2 / 2 + lambda |x|_0 over [lo, hi].
inline double iprox_l0_scalar(double g, double delta, double lambda, double lo, double hi) {
  detail::check_finite_box(lo, hi);
  return detail::shifted_l0(g, delta, lambda, 0.0, lo, hi);
}

/// Global minimizer of g x + delta x^2 / 2 + lambda |x| over [lo, hi].
inline double iprox_l1_scalar(double g, double delta, double lambda, double lo, double hi) {
  detail::check_finite_box(lo, hi);
  return detail::shifted_l1(g, delta, lambda, 0.0, lo, hi);
}

/// Componentwise iprox over the query box intersected with the regularizer box.
inline Vector iprox(const IproxQuery& q, const BoxedSeparableRegularizer& reg) {
  const Index n = q.g.size();
  if (q.d.size() != n || q.box_lower.size() != n || q.box_upper.size() != n || reg.size() != n)
    throw InvalidArgument("iprox: dimension mismatch");
  Vector x(n);
  for (Index i = 0; i < n; ++i) {
    detail::check_finite_box(q.box_lower(i), q.box_upper(i));
    if (q.box_lower(i) > q.box_upper(i))
      throw InvalidArgument("iprox: query box inverted at index " + std::to_string(i));
    const double lo = std::max(q.box_lower(i), reg.lower()(i));
    const double hi = std::min(q.box_upper(i), reg.upper()(i));
    if (lo > hi) throw Infeasible("iprox: empty effective box at index " + std::to_string(i));
    x(i) = detail::shifted_kernel(reg.kind(), q.g(i), q.d(i), reg.weight(i), 0.0, lo, hi);
  }
  return x;
}

/// Usual proximal operator of nu*h at q, restricted to the regularizer box.
inline Vector prox_standard(const Vector& q, double nu, const BoxedSeparableRegularizer& reg) {
  if (!(nu > 0.0) || !std::isfinite(nu)) throw InvalidArgument("prox: nu must be positive");
  if (q.size() != reg.size()) throw InvalidArgument("prox: dimension mismatch");
  const double delta = 1.0 / nu;
  Vector x(q.size());
  for (Index i = 0; i < q.size(); ++i)
    x(i) = detail::shifted_kernel(reg.kind(), -q(i) / nu, delta, reg.weight(i), 0.0,
                                  reg.lower()(i), reg.upper()(i));
  return x;
}

/// Step s minimizing g's + s'diag(d)s/2 + h(x + s) subject to x + s in the
/// regularizer box and |s|_inf <= radius. `radius` may be infinite only when
/// every d_i is positive.
inline Vector iprox_step(const Vector& g, const Vector& d, const Vector& x, double radius,
                         const BoxedSeparableRegularizer& reg) {
  const Index n = x.size();
  if (g.size() != n || d.size() != n || reg.size() != n)
    throw InvalidArgument("iprox_step: dimension mismatch");
  if (!(radius >= 0.0)) throw InvalidArgument("iprox_step: negative radius");
  Vector s(n);
  for (Index i = 0; i < n; ++i) {
    const double lo = std::max(reg.lower()(i) - x(i), -radius);
    const double hi = std::min(reg.upper()(i) - x(i), radius);
    if (lo > hi) throw Infeasible("iprox_step: empty box at index " + std::to_string(i));
    s(i) = detail::shifted_kernel(reg.kind(), g(i), d(i), reg.weight(i), x(i), lo, hi);
  }
  return s;
}

/// x + s, snapped into the regularizer box so that rounding never leaves it.
inline Vector apply_step(const Vector& x, const Vector& s, const BoxedSeparableRegularizer& reg) {
  return (x + s).cwiseMax(reg.lower()).cwiseMin(reg.upper());
}

}  // namespace trdh
