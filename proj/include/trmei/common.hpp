#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace trmei {

using Point = Eigen::VectorXd;
// One point per row.
using PointBatch = Eigen::MatrixXd;

// Axis-aligned box [lower, upper].
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Eigen::Index dimension() const { return lower.size(); }
  bool contains(const Point& x) const {
    return x.size() == lower.size() && (x.array() >= lower.array()).all() &&
           (x.array() <= upper.array()).all();
  }
  static Box unit(Eigen::Index d) {
    return {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Ones(d)};
  }
};

// Bad arguments: dimension mismatches, out-of-range settings, malformed input.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Linear algebra that could not be stabilized (e.g. Cholesky after max jitter).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trmei
