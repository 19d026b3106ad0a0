#pragma once

// Nonlinear SVM: min 1/2 |1 - tanh(b .* (A x))|^2 + lambda |x|_1, with A stored
// samples x features and b in {-1, +1}.

#include <trdh/problem.hpp>
#include <trdh/problems/idx.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <memory>
#include <optional>
#include <random>

namespace trdh {

struct SvmData {
  Matrix A;  // samples x features, entries in [0, 1]
  Vector b;  // labels +-1
};

/// Residual 1 - tanh(b .* (A x)).
inline Vector svm_residual(const SvmData& d, const Vector& x) {
  return Vector(1.0 - (d.b.array() * (d.A * x).array()).tanh());
}

/// Fraction of residual entries below 1, i.e. of samples on the correct side.
inline double svm_accuracy(const SvmData& d, const Vector& x) {
  const Vector r = svm_residual(d, x);
  return double((r.array() < 1.0).count()) / double(r.size());
}

/// Keeps digits `pos` (label +1) and `neg` (label -1); pixels scaled to [0, 1].
inline SvmData svm_data_from_idx(const IdxImages& img, const IdxLabels& lab, int pos = 1, int neg = 7) {
  if (lab.labels.size() != img.count) throw InvalidArgument("svm: image and label counts differ");
  const std::size_t px = std::size_t(img.rows) * img.cols;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < lab.labels.size(); ++i)
    if (lab.labels[i] == pos || lab.labels[i] == neg) keep.push_back(i);
  SvmData d{Matrix(Index(keep.size()), Index(px)), Vector(Index(keep.size()))};
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const std::size_t i = keep[r];
    d.b(Index(r)) = lab.labels[i] == pos ? 1.0 : -1.0;
    for (std::size_t j = 0; j < px; ++j) d.A(Index(r), Index(j)) = img.pixels[i * px + j] / 255.0;
  }
  return d;
}

struct SvmInstance {
  RegularizedProblem problem;
  std::shared_ptr<const SvmData> train;
  std::shared_ptr<const SvmData> test;  // may be null
};

inline SvmInstance svm_problem(SvmData train, std::optional<SvmData> test, double lambda = 0.1) {
  if (train.A.rows() != train.b.size() || train.A.rows() == 0) throw InvalidArgument("svm: bad training data");
  SvmInstance inst;
  inst.train = std::make_shared<const SvmData>(std::move(train));
  if (test) inst.test = std::make_shared<const SvmData>(std::move(*test));
  auto d = inst.train;
  const Index n = d->A.cols();
  RegularizedProblem& p = inst.problem;
  p.name = "svm";
  p.f = [d](const Vector& x) { return 0.5 * svm_residual(*d, x).squaredNorm(); };
  p.grad = [d](const Vector& x) {
    const Eigen::ArrayXd t = (d->b.array() * (d->A * x).array()).tanh();
    const Eigen::ArrayXd w = -(1.0 - t) * (1.0 - t.square()) * d->b.array();
    return Vector(d->A.transpose() * w.matrix());
  };
  p.reg = BoxedSeparableRegularizer::unbounded(NormKind::One, lambda, n);
  p.x0 = Vector::Ones(n);
  p.params = {{"samples", double(d->A.rows())}, {"features", double(n)}, {"lambda", lambda}};
  return inst;
}

/// Standard MNIST file names under `dir` (digits 1 vs 7).
inline SvmInstance load_mnist_svm(const std::string& dir, double lambda = 0.1) {
  auto load = [&](const std::string& images, const std::string& labels) {
    return svm_data_from_idx(parse_idx_images(read_file_bytes(dir + "/" + images)),
                             parse_idx_labels(read_file_bytes(dir + "/" + labels)));
  };
  SvmData train = load("train-images-idx3-ubyte", "train-labels-idx1-ubyte");
  SvmData test = load("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte");
  auto inst = svm_problem(std::move(train), std::move(test), lambda);
  inst.problem.name = "svm-mnist";
  return inst;
}

/// Directory named by TRDH_MNIST_DIR, if set and holding the training images.
inline std::optional<std::string> mnist_dir_from_env() {
  const char* dir = std::getenv("TRDH_MNIST_DIR");
  if (!dir || !*dir) return std::nullopt;
  std::ifstream probe(std::string(dir) + "/train-images-idx3-ubyte", std::ios::binary);
  if (!probe) return std::nullopt;
  return std::string(dir);
}

/// Two-class stand-in for MNIST: each class is a fixed random 8x8 stroke
/// pattern plus pixel noise, written as IDX images with labels 1 and 7.
inline std::pair<IdxImages, IdxLabels> synthetic_digits(std::uint32_t count, std::uint64_t seed,
                                                        std::uint32_t side = 8) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif;
  const std::uint32_t px = side * side;
  std::vector<double> proto[2];
  for (auto& pr : proto) {
    pr.resize(px);
    for (auto& v : pr) v = unif(rng) < 0.3 ? 0.9 : 0.05;
  }
  IdxImages img{count, side, side, std::vector<std::uint8_t>(std::size_t(count) * px)};
  IdxLabels lab{std::vector<std::uint8_t>(count)};
  std::bernoulli_distribution coin;
  std::normal_distribution<double> noise(0.0, 0.15);
  for (std::uint32_t i = 0; i < count; ++i) {
    const int c = coin(rng) ? 1 : 0;
    lab.labels[i] = c ? 1 : 7;
    for (std::uint32_t j = 0; j < px; ++j) {
      const double v = std::clamp(proto[c][j] + noise(rng), 0.0, 1.0);
      img.pixels[std::size_t(i) * px + j] = std::uint8_t(std::lround(255.0 * v));
    }
  }
  return {img, lab};
}

inline SvmInstance synthetic_svm(std::uint32_t samples = 500, std::uint64_t seed = 1234, double lambda = 0.1) {
  const std::uint32_t n_test = samples / 5 + 1;
  const auto [img, lab] = synthetic_digits(samples + n_test, seed);
  const std::ptrdiff_t px = std::ptrdiff_t(img.rows) * img.cols;
  auto split = [&](std::uint32_t from, std::uint32_t count) {
    IdxImages part{count, img.rows, img.cols,
                   std::vector<std::uint8_t>(img.pixels.begin() + from * px,
                                             img.pixels.begin() + (from + count) * px)};
    IdxLabels part_lab{std::vector<std::uint8_t>(lab.labels.begin() + from, lab.labels.begin() + from + count)};
    return svm_data_from_idx(part, part_lab);
  };
  auto inst = svm_problem(split(0, samples), split(samples, n_test), lambda);
  inst.problem.name = "svm-synthetic";
  inst.problem.params.emplace_back("seed", double(seed));
  return inst;
}

}  // namespace trdh
