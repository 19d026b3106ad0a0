#pragma once

// Diagonal Hessian approximations satisfying the (scaled) weak secant
// condition  s~' diag(d) s~ = s~' y~,  s~ = s/|s|, y~ = y/|s|.

#include <trdh/core.hpp>

#include <optional>
#include <utility>

namespace trdh {

enum class DiagKind { Spectral, PSB, Andrei, None };

inline const char* to_string(DiagKind k) {
  switch (k) {
    case DiagKind::Spectral: return "Spec";
    case DiagKind::PSB: return "PSB";
    case DiagKind::Andrei: return "Andrei";
    case DiagKind::None: return "None";
  }
  return "?";
}

/// s = x_k - x_{k-1}, y = grad f(x_k) - grad f(x_{k-1}).
struct SecantPair {
  Vector s;
  Vector y;
};

/// Diagonal of D_k (any sign) with the safeguard |d|_inf <= d_max.
struct DiagonalModel {
  Vector d;
  double d_max = 1e15;
};

namespace detail {

inline void check_pair(const SecantPair& p) {
  if (p.s.size() != p.y.size()) throw InvalidArgument("secant pair: s and y differ in length");
}

// Shared body of the PSB-like and Andrei updates on the scaled pair.
// `shift` is 0 for PSB and 1 for Andrei (the trace term).
inline std::optional<Vector> quasi_cauchy(const Vector& d_prev, const SecantPair& p, double shift) {
  check_pair(p);
  if (d_prev.size() != p.s.size()) throw InvalidArgument("diagonal update: dimension mismatch");
  const double snorm = p.s.norm();
  if (!(snorm > 0.0)) return std::nullopt;
  const Vector st = p.s / snorm;
  const Vector yt = p.y / snorm;
  const Vector st2 = st.cwiseAbs2();
  const double trace4 = st2.squaredNorm();
  const double num = st.dot(yt) + shift * st.squaredNorm() - st2.dot(d_prev);
  Vector d = d_prev + (num / trace4) * st2;
  if (shift != 0.0) d.array() -= shift;
  return d;
}

}  // namespace detail

/// Least-squares solution of sigma*s = y. nullopt when s = 0.
inline std::optional<double> spectral_sigma(const SecantPair& p) {
  detail::check_pair(p);
  const double ss = p.s.squaredNorm();
  if (!(ss > 0.0)) return std::nullopt;
  return p.s.dot(p.y) / ss;
}

/// Minimum Frobenius-norm diagonal correction satisfying the scaled weak secant.
inline std::optional<Vector> psb_diag_update(const Vector& d_prev, const SecantPair& p) {
  return detail::quasi_cauchy(d_prev, p, 0.0);
}

/// Andrei's trace-penalized diagonal update, on the scaled pair.
inline std::optional<Vector> andrei_diag_update(const Vector& d_prev, const SecantPair& p) {
  return detail::quasi_cauchy(d_prev, p, 1.0);
}

inline Vector clip(const Vector& d, double d_max) {
  if (!(d_max > 0.0)) throw InvalidArgument("clip: d_max must be positive");
  return d.cwiseMax(-d_max).cwiseMin(d_max);
}

/// Applies one update of the requested kind in place, then clips.
/// Returns false (and leaves `model` untouched) when the step is too short:
/// |s| < 1e-13 (1 + |x|).
inline bool update_diagonal(DiagonalModel& model, DiagKind kind, const SecantPair& p,
                            double x_norm) {
  if (kind == DiagKind::None) return false;
  if (p.s.norm() < 1e-13 * (1.0 + x_norm)) return false;
  std::optional<Vector> next;
  switch (kind) {
    case DiagKind::Spectral:
      if (auto sigma = spectral_sigma(p)) next = Vector::Constant(model.d.size(), *sigma);
      break;
    case DiagKind::PSB: next = psb_diag_update(model.d, p); break;
    case DiagKind::Andrei: next = andrei_diag_update(model.d, p); break;
    case DiagKind::None: break;
  }
  if (!next || !next->allFinite()) return false;
  model.d = clip(*next, model.d_max);
  return true;
}

}  // namespace trdh
