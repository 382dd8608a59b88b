#include "trmei/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace trmei {

Evaluation Problem::evaluate(const Point& x) const {
  if (x.size() != dimension()) {
    throw InputError(name + ": point has dimension " + std::to_string(x.size()) + ", expected " +
                     std::to_string(dimension()));
  }
  Evaluation e;
  e.f = objective(x);
  e.g.reserve(constraints.size());
  for (const auto& c : constraints) e.g.push_back(c(x));
  return e;
}

void Problem::validate() const {
  if (dimension() < 1) throw InputError(name + ": dimension must be >= 1");
  if (bounds.upper.size() != bounds.lower.size()) throw InputError(name + ": malformed bounds");
  for (Eigen::Index i = 0; i < dimension(); ++i) {
    if (!std::isfinite(bounds.lower[i]) || !std::isfinite(bounds.upper[i]) ||
        !(bounds.lower[i] < bounds.upper[i])) {
      throw InputError(name + ": bounds must be finite with lower < upper");
    }
  }
  if (!objective) throw InputError(name + ": missing objective");
}

double ackley(const Point& x) {
  constexpr double a = 20.0, b = 0.2, c = 2.0 * std::numbers::pi;
  const double d = static_cast<double>(x.size());
  const double sq = x.squaredNorm() / d;
  const double cs = x.unaryExpr([](double v) { return std::cos(c * v); }).sum() / d;
  return -a * std::exp(-b * std::sqrt(sq)) - std::exp(cs) + a + std::numbers::e;
}

double levy(const Point& x) {
  constexpr double pi = std::numbers::pi;
  const Eigen::Index d = x.size();
  const Eigen::ArrayXd w = 1.0 + (x.array() - 1.0) / 4.0;
  double total = std::pow(std::sin(pi * w[0]), 2);
  for (Eigen::Index i = 0; i + 1 < d; ++i) {
    total += std::pow(w[i] - 1.0, 2) * (1.0 + 10.0 * std::pow(std::sin(pi * w[i] + 1.0), 2));
  }
  total += std::pow(w[d - 1] - 1.0, 2) * (1.0 + std::pow(std::sin(2.0 * pi * w[d - 1]), 2));
  return total;
}

double rastrigin(const Point& x) {
  constexpr double a = 10.0;
  double total = a * static_cast<double>(x.size());
  for (const double v : x) total += v * v - a * std::cos(2.0 * std::numbers::pi * v);
  return total;
}

std::vector<double> benchmark_constraints(const Point& x) {
  return {x.sum(), x.norm() - 5.0};
}

bool is_feasible(std::span<const double> g) {
  return std::all_of(g.begin(), g.end(), [](double v) { return v <= 0.0; });
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names{"ackley", "levy", "rastrigin"};
  return names;
}

Problem make_benchmark(const std::string& name, int dimension, double lower, double upper) {
  if (dimension < 1) throw InputError("benchmark dimension must be >= 1");
  Problem p;
  p.name = name;
  p.bounds = {Eigen::VectorXd::Constant(dimension, lower), Eigen::VectorXd::Constant(dimension, upper)};
  if (name == "ackley") {
    p.objective = ackley;
    p.known_optimum = 0.0;
  } else if (name == "levy") {
    p.objective = levy;
  } else if (name == "rastrigin") {
    p.objective = rastrigin;
    p.known_optimum = 0.0;
  } else {
    throw InputError("unknown problem '" + name + "' (expected ackley, levy or rastrigin)");
  }
  p.constraints = {[](const Point& x) { return x.sum(); },
                   [](const Point& x) { return x.norm() - 5.0; }};
  p.validate();
  return p;
}

}  // namespace trmei
