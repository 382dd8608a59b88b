#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trmei/common.hpp"

namespace trmei {

using ScalarFunction = std::function<double(const Point&)>;

struct Evaluation {
  double f = 0.0;
  std::vector<double> g;
};

// Black-box problem: minimize objective(x) over `bounds` subject to
// every constraint(x) <= 0.
struct Problem {
  std::string name;
  Box bounds;
  ScalarFunction objective;
  std::vector<ScalarFunction> constraints;
  std::optional<double> known_optimum;

  Eigen::Index dimension() const { return bounds.dimension(); }
  std::size_t constraint_count() const { return constraints.size(); }
  Evaluation evaluate(const Point& x) const;
  void validate() const;
};

double ackley(const Point& x);
double levy(const Point& x);
double rastrigin(const Point& x);

// (sum x_i, ||x||_2 - 5), shared by every benchmark in the suite.
std::vector<double> benchmark_constraints(const Point& x);
bool is_feasible(std::span<const double> g);

inline constexpr double kBenchmarkLower = -5.0;
inline constexpr double kBenchmarkUpper = 10.0;

// Registry: "ackley", "levy", "rastrigin". Default box [-5, 10]^d.
Problem make_benchmark(const std::string& name, int dimension,
                       double lower = kBenchmarkLower, double upper = kBenchmarkUpper);
const std::vector<std::string>& benchmark_names();

}  // namespace trmei
