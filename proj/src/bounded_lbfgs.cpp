#include "bounded_lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace trmei::detail {
namespace {

Eigen::VectorXd project(const Eigen::VectorXd& x, const Eigen::VectorXd& lower,
                        const Eigen::VectorXd& upper) {
  return x.cwiseMax(lower).cwiseMin(upper);
}

// 1 for coordinates that may move, 0 for those pinned at a bound by the gradient.
Eigen::VectorXd free_mask(const Eigen::VectorXd& x, const Eigen::VectorXd& g,
                          const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double span = 1e-10 * (1.0 + std::abs(upper[i] - lower[i]));
    if ((x[i] <= lower[i] + span && g[i] > 0.0) || (x[i] >= upper[i] - span && g[i] < 0.0)) {
      mask[i] = 0.0;
    }
  }
  return mask;
}

}  // namespace

BoundedMinimum minimize_bounded(const ObjectiveWithGradient& objective, Eigen::VectorXd x0,
                                const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                int max_iterations, double gradient_tolerance, int history) {
  struct Pair {
    Eigen::VectorXd s, y;
    double rho;
  };
  std::deque<Pair> memory;

  Eigen::VectorXd x = project(x0, lower, upper);
  Eigen::VectorXd g(x.size());
  double f = objective(x, g);
  BoundedMinimum best{x, f, 0};
  if (!std::isfinite(f)) return best;

  for (int iter = 0; iter < max_iterations; ++iter) {
    best.iterations = iter + 1;
    const Eigen::VectorXd projected_step = x - project(x - g, lower, upper);
    if (projected_step.lpNorm<Eigen::Infinity>() < gradient_tolerance) break;

    const Eigen::VectorXd mask = free_mask(x, g, lower, upper);
    Eigen::VectorXd q = g.cwiseProduct(mask);
    std::vector<double> alphas(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      alphas[k] = memory[k].rho * memory[k].s.cwiseProduct(mask).dot(q);
      q -= alphas[k] * memory[k].y.cwiseProduct(mask);
    }
    if (!memory.empty()) {
      const Pair& last = memory.back();
      q *= last.s.dot(last.y) / last.y.squaredNorm();
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const double beta = memory[k].rho * memory[k].y.cwiseProduct(mask).dot(q);
      q += (alphas[k] - beta) * memory[k].s.cwiseProduct(mask);
    }
    Eigen::VectorXd direction = -q.cwiseProduct(mask);
    if (direction.dot(g) >= 0.0) {
      direction = -g.cwiseProduct(mask);
      memory.clear();
    }
    if (memory.empty()) {
      // Unit-scaled first step so a huge gradient does not slam into a bound.
      const double norm = direction.lpNorm<Eigen::Infinity>();
      if (norm > 1.0) direction /= norm;
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd x_new, g_new(x.size());
    double f_new = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
      x_new = project(x + step * direction, lower, upper);
      f_new = objective(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm() && sy > 0.0) {
      memory.push_back({s, y, 1.0 / sy});
      if (static_cast<int>(memory.size()) > history) memory.pop_front();
    }
    const double decrease = f - f_new;
    x = x_new;
    g = g_new;
    f = f_new;
    best = {x, f, best.iterations};
    if (decrease <= 1e-12 * (1.0 + std::abs(f))) break;
  }
  return best;
}

}  // namespace trmei::detail
