#pragma once

// Limited-memory SR1 / BFGS Hessian approximations in direct (B, not H) form.
//
// The operator is stored as B = scale*I + sum_j c_j u_j u_j', a list of
// rank-one terms recomputed whenever the pair buffer changes:
//   LBFGS: per pair, (B_j s_j, -1/(s_j' B_j s_j)) and (y_j, 1/(y_j' s_j))
//   LSR1:  per pair, (r_j, 1/(r_j' s_j)) with r_j = y_j - B_j s_j
// where B_j is the operator built from the pairs older than j.

#include <trdh/core.hpp>
#include <trdh/diag_qn.hpp>

#include <cmath>
#include <deque>
#include <vector>

namespace trdh {

enum class HessianKind { LSR1, LBFGS };

inline const char* to_string(HessianKind k) { return k == HessianKind::LSR1 ? "LSR1" : "LBFGS"; }

class LimitedMemoryOp {
 public:
  struct Options {
    int memory = 5;
    double sr1_screen = 1e-8;
    double bfgs_screen = 1e-12;
    double initial_scale = 1.0;
  };

  LimitedMemoryOp(Index n, HessianKind kind) : LimitedMemoryOp(n, kind, Options{}) {}

  LimitedMemoryOp(Index n, HessianKind kind, Options opts)
      : n_(n), kind_(kind), opts_(opts), scale_(opts.initial_scale) {
    if (n <= 0) throw InvalidArgument("LimitedMemoryOp: dimension must be positive");
    if (opts_.memory <= 0) throw InvalidArgument("LimitedMemoryOp: memory must be positive");
    if (!(scale_ > 0.0)) throw InvalidArgument("LimitedMemoryOp: initial scale must be positive");
  }

  Index dim() const { return n_; }
  HessianKind kind() const { return kind_; }
  double scale() const { return scale_; }
  const std::deque<SecantPair>& pairs() const { return pairs_; }

  /// Appends the pair if it passes the curvature (LBFGS) or denominator (LSR1)
  /// screen, evicting the oldest pair beyond `memory`. Returns whether the
  /// pair was kept.
  bool update(const SecantPair& p) {
    if (p.s.size() != n_ || p.y.size() != n_) throw InvalidArgument("LimitedMemoryOp: bad pair size");
    const double sn = p.s.norm(), yn = p.y.norm();
    if (!(sn > 0.0) || !p.y.allFinite()) return false;
    if (kind_ == HessianKind::LBFGS) {
      if (!(p.s.dot(p.y) > opts_.bfgs_screen * sn * yn)) return false;
    } else {
      const Vector r = p.y - apply(p.s);
      if (!(std::abs(r.dot(p.s)) >= opts_.sr1_screen * sn * r.norm())) return false;
      if (r.norm() == 0.0) return false;
    }
    pairs_.push_back(p);
    while (static_cast<int>(pairs_.size()) > opts_.memory) pairs_.pop_front();
    if (kind_ == HessianKind::LBFGS) {
      const SecantPair& last = pairs_.back();
      scale_ = last.y.squaredNorm() / last.s.dot(last.y);
    }
    rebuild();
    return true;
  }

  Vector apply(const Vector& v) const {
    if (v.size() != n_) throw InvalidArgument("LimitedMemoryOp::apply: dimension mismatch");
    Vector out = scale_ * v;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      const double a = coef_[j] * terms_[j].dot(v);
      out.noalias() += a * terms_[j];
    }
    return out;
  }

  /// diag(B), with the same arithmetic as apply(e_i)(i).
  Vector extract_diagonal() const {
    Vector d = Vector::Constant(n_, scale_);
    for (std::size_t j = 0; j < terms_.size(); ++j)
      for (Index i = 0; i < n_; ++i) d(i) += (coef_[j] * terms_[j](i)) * terms_[j](i);
    return d;
  }

  /// Upper bound on |B|_2 from the update structure.
  double norm_bound() const {
    double b = scale_;
    for (std::size_t j = 0; j < terms_.size(); ++j) {
      // LBFGS removal terms only shrink a positive definite operator.
      if (kind_ == HessianKind::LBFGS && coef_[j] < 0.0) continue;
      b += std::abs(coef_[j]) * terms_[j].squaredNorm();
    }
    return b;
  }

  /// |B|_2 estimated by power iteration from a fixed start vector.
  double norm_power(int iterations = 20) const {
    Vector v = Vector::Ones(n_) / std::sqrt(static_cast<double>(n_));
    double est = 0.0;
    for (int k = 0; k < iterations; ++k) {
      Vector w = apply(v);
      const double nw = w.norm();
      if (!(nw > 0.0)) return 0.0;
      est = nw;
      v = w / nw;
    }
    return est;
  }

 private:
  void rebuild() {
    terms_.clear();
    coef_.clear();
    for (const SecantPair& p : pairs_) {
      const Vector Bs = apply(p.s);
      if (kind_ == HessianKind::LBFGS) {
        const double sBs = p.s.dot(Bs);
        terms_.push_back(Bs);
        coef_.push_back(-1.0 / sBs);
        terms_.push_back(p.y);
        coef_.push_back(1.0 / p.y.dot(p.s));
      } else {
        Vector r = p.y - Bs;
        const double rs = r.dot(p.s);
        if (std::abs(rs) < opts_.sr1_screen * p.s.norm() * r.norm() || r.norm() == 0.0) continue;
        coef_.push_back(1.0 / rs);
        terms_.push_back(std::move(r));
      }
    }
  }

  Index n_;
  HessianKind kind_;
  Options opts_;
  double scale_;
  std::deque<SecantPair> pairs_;
  std::vector<Vector> terms_;
  std::vector<double> coef_;
};

}  // namespace trdh
