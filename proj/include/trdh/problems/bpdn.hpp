#pragma once

// Basis pursuit denoise: min 1/2 |Ax - b|^2 + lambda |x|_0, A with orthonormal rows.

#include <trdh/problem.hpp>

#include <Eigen/QR>

#include <algorithm>
#include <cstdint>
#include <memory>
#include <numeric>
#include <random>

namespace trdh {

struct BpdnConfig {
  Index m = 200;
  Index n = 512;
  Index k_nnz = 10;
  double noise_sd = 0.01;
  double lambda_factor = 0.1;  // lambda = lambda_factor * |A'b|_inf
  std::uint64_t seed = 1234;
  bool constrained = false;
};

struct BpdnData {
  Matrix A;
  Vector b;
  Vector x_star;
  double lambda = 0.0;
};

inline BpdnData bpdn_data(const BpdnConfig& cfg) {
  if (cfg.m <= 0 || cfg.n <= 0 || cfg.m >= cfg.n) throw InvalidArgument("bpdn: need 0 < m < n");
  if (cfg.k_nnz <= 0 || cfg.k_nnz > cfg.n) throw InvalidArgument("bpdn: need 0 < k_nnz <= n");
  if (!(cfg.noise_sd >= 0.0)) throw InvalidArgument("bpdn: noise_sd must be nonnegative");
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;

  // Orthonormal rows: thin Q of an n x m Gaussian, transposed.
  Matrix G(cfg.n, cfg.m);
  for (Index j = 0; j < cfg.m; ++j)
    for (Index i = 0; i < cfg.n; ++i) G(i, j) = normal(rng);
  Eigen::HouseholderQR<Matrix> qr(G);
  BpdnData d;
  d.A = (qr.householderQ() * Matrix::Identity(cfg.n, cfg.m)).transpose();

  std::vector<Index> idx(static_cast<std::size_t>(cfg.n));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  d.x_star = Vector::Zero(cfg.n);
  std::bernoulli_distribution coin;
  for (Index t = 0; t < cfg.k_nnz; ++t)
    d.x_star(idx[static_cast<std::size_t>(t)]) = cfg.constrained || coin(rng) ? 1.0 : -1.0;

  Vector noise(cfg.m);
  for (Index i = 0; i < cfg.m; ++i) noise(i) = normal(rng);
  d.b = d.A * d.x_star + cfg.noise_sd * noise;
  d.lambda = cfg.lambda_factor * inf_norm(d.A.transpose() * d.b);
  return d;
}

inline RegularizedProblem bpdn_problem(const BpdnConfig& cfg) {
  auto data = std::make_shared<const BpdnData>(bpdn_data(cfg));
  const Index n = cfg.n;
  RegularizedProblem p;
  p.name = cfg.constrained ? "bpdn-cstr" : "bpdn";
  p.f = [data](const Vector& x) { return 0.5 * (data->A * x - data->b).squaredNorm(); };
  p.grad = [data](const Vector& x) { return Vector(data->A.transpose() * (data->A * x - data->b)); };
  p.reg = BoxedSeparableRegularizer(NormKind::Zero, data->lambda,
                                    Vector::Constant(n, cfg.constrained ? 0.0 : -kInf),
                                    Vector::Constant(n, kInf));
  p.x0 = Vector::Zero(n);
  p.x_star = data->x_star;
  p.params = {{"m", double(cfg.m)},           {"n", double(n)},
              {"k_nnz", double(cfg.k_nnz)},   {"noise_sd", cfg.noise_sd},
              {"lambda", data->lambda},       {"lambda_factor", cfg.lambda_factor},
              {"seed", double(cfg.seed)},     {"constrained", cfg.constrained ? 1.0 : 0.0}};
  return p;
}

}  // namespace trdh
