#pragma once

#include <trdh/core.hpp>
#include <trdh/prox.hpp>

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace trdh {

/// min f(x) + h(x) subject to lower <= x <= upper, with h and the bounds held
/// by `reg`. `f` may return +inf where the model is undefined; such points
/// are rejected by the solvers.
struct RegularizedProblem {
  std::string name;
  std::function<double(const Vector&)> f;
  std::function<Vector(const Vector&)> grad;
  BoxedSeparableRegularizer reg;
  Vector x0;
  std::optional<Vector> x_star;
  /// Reproducibility manifest: seeds, sizes, lambda, generator constants.
  std::vector<std::pair<std::string, double>> params;

  Index dim() const { return x0.size(); }

  void validate() const {
    if (!f || !grad) throw InvalidArgument(name + ": objective or gradient missing");
    if (reg.size() != x0.size()) throw InvalidArgument(name + ": regularizer dimension mismatch");
    if (!reg.contains(x0)) throw InvalidArgument(name + ": x0 violates the bounds");
    if (x_star && x_star->size() != x0.size())
      throw InvalidArgument(name + ": x_star dimension mismatch");
  }
};

}  // namespace trdh
