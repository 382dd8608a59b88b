#include <doctest.h>

#include <algorithm>

#include "trmei/acquisition.hpp"
#include "trmei/optimizer.hpp"

using namespace trmei;

namespace {

OptimizerConfig small_config(int budget, std::uint64_t seed) {
  OptimizerConfig c;
  c.n_init = 4;
  c.budget = budget;
  c.seed = seed;
  c.gp.restarts = 2;
  return c;
}

void check_trace_invariants(const RunTrace& t) {
  for (std::size_t i = 1; i < t.records.size(); ++i) {
    CHECK(t.records[i].incumbent_F <= t.records[i - 1].incumbent_F);
    if (t.records[i - 1].feasible_best) {
      REQUIRE(t.records[i].feasible_best);
      CHECK(*t.records[i].feasible_best <= *t.records[i - 1].feasible_best);
    }
    if (t.records[i - 1].incumbent_feasible) CHECK(t.records[i].incumbent_feasible);
  }
}

}  // namespace

TEST_CASE("improvement threshold") {
  CHECK(is_improvement(0.9, 1.0));
  CHECK(!is_improvement(0.9995, 1.0));
  CHECK(!is_improvement(1.0, 1.0));
  CHECK(is_improvement(-1e-5, 0.0));
  CHECK(!is_improvement(-1e-7, 0.0));
}

TEST_CASE("budget zero returns the initial design") {
  const Problem p = make_benchmark("ackley", 2);
  const RunTrace t = run(p, small_config(0, 1));
  REQUIRE(t.records.size() == 4);
  double best = INFINITY;
  int arg = 0;
  for (const auto& r : t.records) {
    const double F = r.f + t.penalty_raw * static_cast<double>(std::count_if(r.g.begin(), r.g.end(), [](double g) { return g > 0; }));
    if (F < best) best = F, arg = r.index;
  }
  CHECK(t.incumbent().index == arg);
  CHECK(t.records.back().incumbent_F == doctest::Approx(best));
}

TEST_CASE("evaluation count, determinism and incumbent monotonicity") {
  const Problem p = make_benchmark("ackley", 2);
  int calls = 0;
  Problem counted = p;
  counted.objective = [&](const Point& x) {
    ++calls;
    return ackley(x);
  };
  const RunTrace a = run(counted, small_config(12, 3));
  CHECK(calls == 16);
  CHECK(a.records.size() == 16);
  check_trace_invariants(a);
  const RunTrace b = run(p, small_config(12, 3));
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].x == b.records[i].x);
    CHECK(a.records[i].f == b.records[i].f);
  }
}

TEST_CASE("every step picks the argmax of the acquisition inside the region") {
  const Problem p = make_benchmark("rastrigin", 3);
  int steps = 0;
  run(p, small_config(6, 5), [&](const IterationInfo& info) {
    ++steps;
    REQUIRE(info.candidates);
    const PointBatch& c = *info.candidates;
    CHECK(info.scores.size() == c.rows());
    CHECK(info.scores[info.chosen] == info.scores.maxCoeff());
    for (Eigen::Index i = 0; i < c.rows(); ++i) CHECK(info.region.contains(c.row(i).transpose()));
  });
  CHECK(steps == 6);
}

TEST_CASE("small constrained ackley converges") {
  std::vector<double> finals;
  for (std::uint64_t s = 0; s < 5; ++s) {
    OptimizerConfig c = small_config(30, s);
    c.gp.restarts = 5;
    const RunTrace t = run(make_benchmark("ackley", 2), c);
    check_trace_invariants(t);
    REQUIRE(t.records.back().feasible_best);
    finals.push_back(*t.records.back().feasible_best);
  }
  std::sort(finals.begin(), finals.end());
  CHECK(finals[2] <= 1.0);
}

TEST_CASE("evaluation failure carries the partial trace") {
  Problem p = make_benchmark("ackley", 2);
  int calls = 0;
  p.objective = [&](const Point& x) {
    if (++calls == 7) throw std::runtime_error("simulator crashed");
    return ackley(x);
  };
  try {
    run(p, small_config(10, 0));
    FAIL("expected RunFailure");
  } catch (const RunFailure& e) {
    CHECK(e.trace.records.size() == 6);
  }
}

TEST_CASE("configuration validation") {
  const Problem p = make_benchmark("ackley", 2);
  OptimizerConfig c = small_config(5, 0);
  c.n_init = 1;
  CHECK_THROWS_AS(run(p, c), InputError);
  c = small_config(-1, 0);
  CHECK_THROWS_AS(run(p, c), InputError);
  c = small_config(5, 0);
  c.penalty.big_m = -1;
  CHECK_THROWS_AS(run(p, c), InputError);
  CHECK(OptimizerConfig{}.resolve(20).n_init == 40);
}

TEST_CASE("thompson selection rule") {
  Eigen::VectorXd f(4);
  f << 3.0, 1.0, 2.0, 0.5;
  // Unconstrained: plain argmin.
  CHECK(thompson_select(f, {}) == 3);
  Eigen::VectorXd g(4);
  g << -1.0, 0.5, -0.1, 2.0;
  CHECK(thompson_select(f, {g}) == 2);
  // Nobody feasible: fewest violations, then least total violation.
  Eigen::VectorXd g1(4), g2(4);
  g1 << 1.0, 0.2, 3.0, 0.1;
  g2 << 1.0, -1.0, -1.0, 0.1;
  CHECK(thompson_select(f, {g1, g2}) == 1);
  g1 << 1.0, 0.4, 0.3, 0.1;
  CHECK(thompson_select(f, {g1, g2}) == 2);
}

TEST_CASE("baselines") {
  const Problem p = make_benchmark("levy", 3);
  OptimizerConfig c = small_config(8, 2);
  c.trust_region.n_candidates = 50;
  const RunTrace ts = run_ts_baseline(p, c);
  CHECK(ts.records.size() == 12);
  CHECK(ts.method == "tr-ts");
  check_trace_invariants(ts);
  CHECK(run_ts_baseline(p, c).records.back().x == ts.records.back().x);

  const RunTrace rnd = run_random_baseline(p, c);
  CHECK(rnd.records.size() == 12);
  check_trace_invariants(rnd);
  for (const auto& r : rnd.records) CHECK(p.bounds.contains(r.x));
  // Shares the initial design with the model-based runs.
  for (int i = 0; i < 4; ++i) CHECK(rnd.records[i].x == ts.records[i].x);
}
