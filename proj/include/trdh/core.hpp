#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace trdh {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Raised for malformed inputs (non-finite values, inverted boxes, bad sizes).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Raised when the feasible box of a subproblem is empty.
struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Raised when a model quantity that must be nonnegative is clearly negative.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed binary input; `offset` is the byte position where parsing failed.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset(offset) {}
  std::size_t offset;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

}  // namespace trdh
