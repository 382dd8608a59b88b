#pragma once

#include <functional>

#include <Eigen/Dense>

namespace trmei::detail {

// Returns f(x) and writes its gradient. May return +inf for infeasible x.
using ObjectiveWithGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct BoundedMinimum {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
};

// Projected L-BFGS on a box: two-loop recursion over the free variables,
// Armijo backtracking along the projected path.
BoundedMinimum minimize_bounded(const ObjectiveWithGradient& objective, Eigen::VectorXd x0,
                                const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                int max_iterations, double gradient_tolerance = 1e-6,
                                int history = 8);

}  // namespace trmei::detail
