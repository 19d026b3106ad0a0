#pragma once

// Sparse nonnegative matrix factorization: min 1/2 |A - WH|_F^2 + lambda |vec H|_0
// subject to W, H >= 0. The variable is (vec W, vec H), both column-major.

#include <trdh/problem.hpp>

#include <cstdint>
#include <memory>
#include <random>

namespace trdh {

struct NnmfConfig {
  Index m = 100;
  Index n = 50;
  Index k = 5;
  double lambda = 0.1;
  double cluster_sd = 0.1;  // spread of each column around its center
  double x0_scale = 2.0;    // x0 entries uniform in [0, x0_scale]
  std::uint64_t seed = 1234;
};

struct NnmfData {
  Index m = 0, n = 0, k = 0;
  Matrix A;
};

inline NnmfData nnmf_data(const NnmfConfig& cfg) {
  if (cfg.m <= 0 || cfg.n <= 0 || cfg.k <= 0 || cfg.k >= std::min(cfg.m, cfg.n))
    throw InvalidArgument("nnmf: need 0 < k < min(m, n)");
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif;
  std::normal_distribution<double> normal;
  std::uniform_int_distribution<Index> pick(0, cfg.k - 1);

  Matrix centers(cfg.m, cfg.k);
  for (Index j = 0; j < cfg.k; ++j)
    for (Index i = 0; i < cfg.m; ++i) centers(i, j) = unif(rng);
  NnmfData d{cfg.m, cfg.n, cfg.k, Matrix(cfg.m, cfg.n)};
  for (Index j = 0; j < cfg.n; ++j) {
    const Index c = pick(rng);
    for (Index i = 0; i < cfg.m; ++i) d.A(i, j) = std::max(0.0, centers(i, c) + cfg.cluster_sd * normal(rng));
  }
  return d;
}

inline RegularizedProblem nnmf_problem(const NnmfConfig& cfg) {
  auto data = std::make_shared<const NnmfData>(nnmf_data(cfg));
  const Index m = cfg.m, n = cfg.n, k = cfg.k, nw = m * k, dim = m * k + k * n;

  // Residual WH - A for a stacked variable.
  auto residual = [data, m, n, k, nw](const Vector& x) {
    const Eigen::Map<const Matrix> W(x.data(), m, k);
    const Eigen::Map<const Matrix> H(x.data() + nw, k, n);
    return Matrix(W * H - data->A);
  };
  RegularizedProblem p;
  p.name = "nnmf";
  p.f = [residual](const Vector& x) { return 0.5 * residual(x).squaredNorm(); };
  p.grad = [residual, m, n, k, nw, dim](const Vector& x) {
    const Eigen::Map<const Matrix> W(x.data(), m, k);
    const Eigen::Map<const Matrix> H(x.data() + nw, k, n);
    const Matrix R = residual(x);
    Vector g(dim);
    Eigen::Map<Matrix>(g.data(), m, k) = R * H.transpose();
    Eigen::Map<Matrix>(g.data() + nw, k, n) = W.transpose() * R;
    return g;
  };
  std::vector<bool> active(static_cast<std::size_t>(dim), false);
  std::fill(active.begin() + nw, active.end(), true);
  p.reg = BoxedSeparableRegularizer(NormKind::Zero, cfg.lambda, Vector::Zero(dim),
                                    Vector::Constant(dim, kInf), active);

  // x0 draws come after the data so that x0_scale does not change A.
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unif(0.0, cfg.x0_scale);
  p.x0 = Vector(dim);
  for (Index i = 0; i < dim; ++i) p.x0(i) = unif(rng);
  p.params = {{"m", double(m)},          {"n", double(n)},
              {"k", double(k)},          {"lambda", cfg.lambda},
              {"cluster_sd", cfg.cluster_sd}, {"x0_scale", cfg.x0_scale},
              {"seed", double(cfg.seed)}};
  return p;
}

/// A as generated for the given config (for analysis and tests).
inline Matrix nnmf_matrix(const NnmfConfig& cfg) { return nnmf_data(cfg).A; }

}  // namespace trdh
