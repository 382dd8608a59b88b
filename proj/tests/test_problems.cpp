#include <doctest.h>

#include <algorithm>
#include <random>

#include "trmei/problems.hpp"
#include "trmei/sampling.hpp"

using namespace trmei;

TEST_CASE("benchmark zeros") {
  for (const int d : {1, 2, 5, 20}) {
    CHECK(std::abs(ackley(Point::Zero(d))) < 1e-12);
    CHECK(std::abs(levy(Point::Ones(d))) < 1e-12);
    CHECK(std::abs(rastrigin(Point::Zero(d))) < 1e-12);
  }
}

TEST_CASE("benchmark spot values") {
  CHECK(ackley(Point::Ones(2)) == doctest::Approx(3.62538493844036).epsilon(1e-12));
  CHECK(levy(Point::Zero(1)) == doctest::Approx(0.625).epsilon(1e-12));
  CHECK(rastrigin(Point::Constant(1, 0.5)) == doctest::Approx(20.25).epsilon(1e-12));
}

TEST_CASE("ackley is symmetric under permutation") {
  Point x(4);
  x << 0.3, -1.2, 2.5, 0.7;
  Point y = x;
  std::reverse(y.begin(), y.end());
  CHECK(ackley(x) == doctest::Approx(ackley(y)).epsilon(1e-14));
}

TEST_CASE("objectives are nonnegative") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-5, 10);
  for (int i = 0; i < 2000; ++i) {
    Point x(7);
    for (auto& v : x) v = u(rng);
    CHECK(ackley(x) >= -1e-12);
    CHECK(levy(x) >= 0.0);
    CHECK(rastrigin(x) >= 0.0);
  }
}

TEST_CASE("constraints") {
  auto g = benchmark_constraints(Point::Zero(3));
  CHECK(g[0] == 0.0);
  CHECK(g[1] == -5.0);
  CHECK(is_feasible(g));

  g = benchmark_constraints(Point::Ones(20));
  CHECK(g[0] == doctest::Approx(20.0));
  CHECK(g[1] == doctest::Approx(-0.527864045000421).epsilon(1e-12));
  CHECK(!is_feasible(g));

  g = benchmark_constraints(Point::Constant(2, -4.0));
  CHECK(g[0] == doctest::Approx(-8.0));
  CHECK(g[1] == doctest::Approx(0.656854249492380).epsilon(1e-12));
  CHECK(!is_feasible(g));
}

TEST_CASE("feasibility agrees with direct evaluation") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-5, 10);
  for (int i = 0; i < 100000; ++i) {
    Point x(3);
    for (auto& v : x) v = u(rng);
    const bool direct = x.sum() <= 0.0 && x.norm() <= 5.0;
    CHECK_EQ(is_feasible(benchmark_constraints(x)), direct);
  }
}

TEST_CASE("registry") {
  const Problem p = make_benchmark("levy", 4);
  CHECK(p.dimension() == 4);
  CHECK(p.constraint_count() == 2);
  CHECK(p.bounds.lower[0] == -5.0);
  CHECK(p.bounds.upper[3] == 10.0);
  CHECK(!p.known_optimum);
  CHECK(*make_benchmark("ackley", 3).known_optimum == 0.0);
  const Evaluation e = p.evaluate(Point::Ones(4));
  CHECK(e.f == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(e.g.size() == 2);
  CHECK_THROWS_AS(make_benchmark("sphere", 2), InputError);
  CHECK_THROWS_AS(make_benchmark("ackley", 0), InputError);
  CHECK_THROWS_AS(make_benchmark("ackley", 2, 3.0, 1.0), InputError);
  CHECK(benchmark_names().size() == 3);
}

TEST_CASE("initial design") {
  const Box dom{Point::Constant(20, -5), Point::Constant(20, 10)};
  const PointBatch a = initial_design(dom, 40, 3);
  CHECK(a.rows() == 40);
  for (Eigen::Index i = 0; i < a.rows(); ++i) CHECK(dom.contains(a.row(i).transpose()));
  CHECK(a == initial_design(dom, 40, 3));
  CHECK(a != initial_design(dom, 40, 4));

  const PointBatch b = initial_design(Box::unit(1), 4, 0);
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) CHECK(b(i, 0) != b(j, 0));
  }
  CHECK_THROWS_AS(initial_design(dom, 1, 0), InputError);
}

TEST_CASE("unit maps round trip") {
  const Box dom{Point::Constant(3, -5), Point::Constant(3, 10)};
  Point x(3);
  x << -5, 0, 10;
  const Point u = to_unit(dom, x);
  CHECK(u[0] == 0.0);
  CHECK(u[1] == doctest::Approx(1.0 / 3.0));
  CHECK(u[2] == 1.0);
  CHECK((from_unit(dom, u) - x).norm() < 1e-12);
}
