#pragma once

// FitzHugh-Nagumo parameter fit:
//   V' = (V - V^3/3 - W + x1) / x2,   W' = x2 (x3 V - x4 W + x5),
// sampled on a uniform grid and compared against the trajectory for x_bar.
// The gradient integrates the forward sensitivities d(V, W)/dx with the same
// RK4 steps, so it is the exact derivative of the discretized objective.

#include <trdh/problem.hpp>

#include <array>
#include <cmath>
#include <memory>

namespace trdh {

struct FhConfig {
  double t_end = 20.0;
  Index n_intervals = 100;  // samples at n_intervals + 1 grid points
  int substeps = 10;
  double v0 = 2.0;
  double w0 = 0.0;
  std::array<double, 5> x_bar{0.0, 0.2, 1.0, 0.0, 0.0};
  double lambda = 10.0;
  bool constrained = false;
  double x2_lower = 0.5;  // constrained variant only
  /// Starting point; the constrained default lifts x2 strictly above its bound.
  std::array<double, 5> x0{0.5, 0.5, 0.5, 0.5, 0.5};
  std::array<double, 5> x0_constrained{0.5, 0.6, 0.5, 0.5, 0.5};
};

struct FhTrajectory {
  Vector v, w;
  Matrix sv, sw;  // samples x 5 sensitivities (only when requested)
  bool ok = true;
};

namespace detail {

inline constexpr double kFhMinX2 = 1e-6;
inline constexpr double kFhBlowup = 1e8;

using FhState = Eigen::Matrix<double, 12, 1>;  // V, W, dV/dx (5), dW/dx (5)

inline FhState fh_rhs(const FhState& z, const Vector& x, bool sens) {
  const double V = z(0), W = z(1);
  const double x1 = x(0), x2 = x(1), x3 = x(2), x4 = x(3), x5 = x(4);
  const double cubic = V - V * V * V / 3.0 - W + x1;
  const double lin = x3 * V - x4 * W + x5;
  FhState dz = FhState::Zero();
  dz(0) = cubic / x2;
  dz(1) = x2 * lin;
  if (!sens) return dz;
  const double j00 = (1.0 - V * V) / x2, j01 = -1.0 / x2, j10 = x2 * x3, j11 = -x2 * x4;
  const std::array<double, 5> dfv{1.0 / x2, -cubic / (x2 * x2), 0.0, 0.0, 0.0};
  const std::array<double, 5> dfw{0.0, lin, x2 * V, -x2 * W, x2};
  for (int j = 0; j < 5; ++j) {
    const double sv = z(2 + j), sw = z(7 + j);
    dz(2 + j) = j00 * sv + j01 * sw + dfv[std::size_t(j)];
    dz(7 + j) = j10 * sv + j11 * sw + dfw[std::size_t(j)];
  }
  return dz;
}

}  // namespace detail

inline FhTrajectory fh_simulate(const FhConfig& cfg, const Vector& x, bool sens) {
  if (x.size() != 5) throw InvalidArgument("fh: parameter vector must have 5 entries");
  const Index ns = cfg.n_intervals + 1;
  FhTrajectory tr{Vector(ns), Vector(ns), Matrix(), Matrix(), true};
  if (sens) {
    tr.sv = Matrix::Zero(ns, 5);
    tr.sw = Matrix::Zero(ns, 5);
  }
  if (!(std::abs(x(1)) >= detail::kFhMinX2) || !x.allFinite()) {
    tr.ok = false;
    return tr;
  }
  const double h = cfg.t_end / double(cfg.n_intervals * cfg.substeps);
  detail::FhState z = detail::FhState::Zero();
  z(0) = cfg.v0;
  z(1) = cfg.w0;
  auto record = [&](Index i) {
    tr.v(i) = z(0);
    tr.w(i) = z(1);
    if (sens) {
      tr.sv.row(i) = z.segment<5>(2).transpose();
      tr.sw.row(i) = z.segment<5>(7).transpose();
    }
  };
  record(0);
  for (Index i = 1; i < ns; ++i) {
    for (int s = 0; s < cfg.substeps; ++s) {
      const detail::FhState k1 = detail::fh_rhs(z, x, sens);
      const detail::FhState k2 = detail::fh_rhs(z + 0.5 * h * k1, x, sens);
      const detail::FhState k3 = detail::fh_rhs(z + 0.5 * h * k2, x, sens);
      const detail::FhState k4 = detail::fh_rhs(z + h * k3, x, sens);
      z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!z.allFinite() || std::abs(z(0)) > detail::kFhBlowup || std::abs(z(1)) > detail::kFhBlowup) {
      tr.ok = false;
      return tr;
    }
    record(i);
  }
  return tr;
}

inline RegularizedProblem fh_problem(const FhConfig& cfg) {
  if (cfg.n_intervals <= 0 || cfg.substeps <= 0 || !(cfg.t_end > 0.0))
    throw InvalidArgument("fh: grid must be nonempty");
  Vector x_bar(5);
  for (int j = 0; j < 5; ++j) x_bar(j) = cfg.x_bar[std::size_t(j)];
  const FhTrajectory target = fh_simulate(cfg, x_bar, false);
  if (!target.ok) throw InvalidArgument("fh: target trajectory diverges");
  auto shared = std::make_shared<const std::pair<FhConfig, FhTrajectory>>(cfg, target);

  RegularizedProblem p;
  p.name = cfg.constrained ? "fh-cstr" : "fh";
  p.f = [shared](const Vector& x) {
    const FhTrajectory tr = fh_simulate(shared->first, x, false);
    if (!tr.ok) return kInf;
    return 0.5 * ((tr.v - shared->second.v).squaredNorm() + (tr.w - shared->second.w).squaredNorm());
  };
  p.grad = [shared](const Vector& x) {
    const FhTrajectory tr = fh_simulate(shared->first, x, true);
    if (!tr.ok) throw NumericalError("fh: gradient requested where the model diverges");
    return Vector(tr.sv.transpose() * (tr.v - shared->second.v) +
                  tr.sw.transpose() * (tr.w - shared->second.w));
  };
  Vector lo = Vector::Constant(5, -kInf);
  if (cfg.constrained) lo(1) = cfg.x2_lower;
  p.reg = BoxedSeparableRegularizer(NormKind::Zero, cfg.lambda, lo, Vector::Constant(5, kInf));
  const auto& x0 = cfg.constrained ? cfg.x0_constrained : cfg.x0;
  p.x0 = Vector(5);
  for (int j = 0; j < 5; ++j) p.x0(j) = x0[std::size_t(j)];
  if (!cfg.constrained) p.x_star = x_bar;
  p.params = {{"t_end", cfg.t_end},         {"n_intervals", double(cfg.n_intervals)},
              {"substeps", double(cfg.substeps)}, {"v0", cfg.v0},
              {"w0", cfg.w0},               {"lambda", cfg.lambda},
              {"constrained", cfg.constrained ? 1.0 : 0.0}, {"x2_lower", cfg.x2_lower}};
  for (int j = 0; j < 5; ++j) p.params.emplace_back("x0_" + std::to_string(j + 1), p.x0(j));
  return p;
}

}  // namespace trdh
