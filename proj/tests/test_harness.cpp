#include <doctest.h>

#include <array>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "trmei/harness.hpp"
#include "trmei/plot.hpp"
#include "trmei/serialization.hpp"

using namespace trmei;
namespace fs = std::filesystem;

namespace {

RunTrace fake_trace(const std::vector<std::pair<double, bool>>& evals) {
  RunTrace t;
  t.problem = "ackley";
  t.method = "random";
  std::optional<double> best;
  int i = 0;
  for (const auto& [f, feas] : evals) {
    TraceRecord r;
    r.index = i++;
    r.x = Point::Zero(1);
    r.f = f;
    r.g = {feas ? -1.0 : 1.0};
    r.feasible = feas;
    if (feas) best = best ? std::min(*best, f) : f;
    r.feasible_best = best;
    t.records.push_back(r);
  }
  return t;
}

CampaignSpec tiny_spec() {
  CampaignSpec s;
  s.problems = {"ackley"};
  s.dimension = 2;
  s.methods = {"random", "tr-mei"};
  s.seeds = {0, 1, 2};
  s.config.n_init = 4;
  s.config.budget = 4;
  s.config.gp.restarts = 1;
  return s;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("summary statistics") {
  const std::array<double, 3> ones{1, 1, 1};
  SummaryRow r = summarize_values("p", "m", ones);
  CHECK(r.mean == 1.0);
  CHECK(r.std == 0.0);
  CHECK(r.median == 1.0);
  const std::array<double, 2> two{0, 2};
  r = summarize_values("p", "m", two);
  CHECK(r.mean == 1.0);
  CHECK(r.std == doctest::Approx(1.41421356237310));
  CHECK(r.se == doctest::Approx(1.0));
  CHECK(r.median == 1.0);
  const std::array<double, 4> a{3, 1, 4, 1.5}, b{1.5, 4, 1, 3};
  const SummaryRow ra = summarize_values("p", "m", a), rb = summarize_values("p", "m", b);
  CHECK(ra.mean == rb.mean);
  CHECK(ra.std == rb.std);
  CHECK(ra.median == 2.25);
}

TEST_CASE("feasible-best curves") {
  const RunTrace none = fake_trace({{5, false}, {3, false}});
  CHECK(feasible_best_curve(none, 9.0) == std::vector<double>{9.0, 9.0});
  const RunTrace some = fake_trace({{5, false}, {4, true}, {6, true}, {2, true}});
  CHECK(feasible_best_curve(some, 9.0) == std::vector<double>{9.0, 4.0, 4.0, 2.0});
}

TEST_CASE("worst value spans methods and seeds") {
  std::vector<CampaignCell> cells(3);
  cells[0] = {"ackley", "random", 0, fake_trace({{5, true}, {50, false}}), ""};
  cells[1] = {"ackley", "tr-mei", 0, fake_trace({{7, true}}), ""};
  cells[2] = {"levy", "tr-mei", 0, fake_trace({{3, false}, {8, false}}), ""};
  CHECK(worst_value_for(cells, "ackley") == 7.0);
  CHECK(worst_value_for(cells, "levy") == 8.0);
}

TEST_CASE("campaign counting, determinism and outputs") {
  const CampaignSpec spec = tiny_spec();
  const CampaignResult a = run_campaign(spec);
  CHECK(a.cells.size() == 6);
  REQUIRE(a.curves.size() == 2);
  for (const auto& c : a.curves) {
    CHECK(c.curves.rows() == 8);
    CHECK(c.curves.cols() == 3);
    for (Eigen::Index s = 0; s < c.curves.cols(); ++s) {
      for (Eigen::Index t = 1; t < c.curves.rows(); ++t) CHECK(c.curves(t, s) <= c.curves(t - 1, s));
    }
  }
  const auto rows = summarize(a);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].method == "random");
  CHECK(rows[1].method == "tr-mei");
  CHECK(rows[0].n_seeds == 3);

  CampaignSpec threaded = spec;
  threaded.workers = 3;
  const CampaignResult b = run_campaign(threaded);
  const nlohmann::json echo = campaign_spec_to_json(spec);
  CHECK(summary_csv(summarize(a), echo) == summary_csv(summarize(b), echo));

  const fs::path dir = fs::temp_directory_path() / "trmei_harness_test";
  fs::remove_all(dir);
  write_campaign_outputs(a, dir, echo);
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "curves" / "ackley_tr-mei.csv"));
  CHECK(fs::exists(dir / "traces" / "ackley_random_2.json"));
  const std::string summary = slurp(dir / "summary.csv");
  CHECK(summary.rfind("# config=", 0) == 0);
  CHECK(summary.find("problem,method,n_seeds,mean,std,se,median") != std::string::npos);
  const auto trace = nlohmann::json::parse(slurp(dir / "traces" / "ackley_random_2.json"));
  CHECK(trace.contains("config"));
  CHECK(trace["records"].size() == 8);

  // Plotting the written curves is deterministic.
  const std::vector<fs::path> inputs{dir / "curves" / "ackley_random.csv", dir / "curves" / "ackley_tr-mei.csv"};
  const PlotOutcome p1 = plot_curve_files(inputs, dir / "plots", false);
  REQUIRE(p1.written.size() == 1);
  const std::string svg1 = slurp(p1.written[0]);
  plot_curve_files(inputs, dir / "plots", false);
  CHECK(slurp(p1.written[0]) == svg1);
  CHECK(svg1.find("series-random") != std::string::npos);
  CHECK(svg1.find("series-tr-mei") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("failed cells do not abort the campaign") {
  std::vector<CampaignCell> cells(2);
  cells[0] = {"ackley", "random", 0, fake_trace({{5, true}}), ""};
  cells[1] = {"ackley", "random", 1, std::nullopt, "boom"};
  const CampaignResult r = aggregate(cells);
  const auto rows = summarize(r);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].n_seeds == 1);
}

TEST_CASE("spec validation") {
  CampaignSpec s = tiny_spec();
  s.seeds = {1, 1};
  CHECK_THROWS_AS(s.validate(), InputError);
  s = tiny_spec();
  s.methods.clear();
  CHECK_THROWS_AS(s.validate(), InputError);
  s = tiny_spec();
  s.methods = {"bogus"};
  CHECK_THROWS_AS(s.validate(), InputError);
}

TEST_CASE("config json round trip") {
  OptimizerConfig c;
  c.budget = 17;
  c.penalty.big_m = 3.5;
  c.trust_region.length_init = 0.4;
  c.gp.restarts = 2;
  const OptimizerConfig back = config_from_json(config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
  CHECK(config_from_json(nlohmann::json{{"budget", 3}}).budget == 3);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"bugdet", 3}}), InputError);

  const CampaignSpec spec = tiny_spec();
  const CampaignSpec again = campaign_spec_from_json(campaign_spec_to_json(spec));
  CHECK(campaign_spec_to_json(again) == campaign_spec_to_json(spec));
}

TEST_CASE("log-scale plot drops nonpositive points") {
  CurveSeries s{"m", {1, 2, 3}, {1.0, 0.0, -1.0}, {0.1, 0.1, 0.1}};
  const SvgPlot plot = render_convergence_svg("t", {s}, true);
  CHECK(plot.dropped_points == 2);
  CHECK(render_convergence_svg("t", {s}, false).dropped_points == 0);
}

TEST_CASE("missing plot inputs are all listed") {
  try {
    plot_curve_files({"/nonexistent/a_x.csv", "/nonexistent/b_y.csv"}, fs::temp_directory_path(), false);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("a_x.csv") != std::string::npos);
    CHECK(msg.find("b_y.csv") != std::string::npos);
  }
}
