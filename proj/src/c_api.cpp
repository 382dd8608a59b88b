#include "trmei/trmei.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "trmei/harness.hpp"
#include "trmei/plot.hpp"
#include "trmei/serialization.hpp"

struct trmei_config {
  trmei::OptimizerConfig config;
};

struct trmei_problem {
  trmei::Problem problem;
};

struct trmei_trace {
  trmei::RunTrace trace;
  nlohmann::json echo;
};

struct trmei_campaign {
  trmei::CampaignSpec spec;
  trmei::CampaignResult result;
};

namespace {

thread_local std::string g_last_error;

trmei_status fail(trmei_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename Body>
trmei_status guarded(Body&& body) {
  try {
    body();
    return TRMEI_OK;
  } catch (const trmei::InputError& e) {
    return fail(TRMEI_ERR_INVALID_ARGUMENT, e.what());
  } catch (const nlohmann::json::exception& e) {
    return fail(TRMEI_ERR_INVALID_ARGUMENT, e.what());
  } catch (const trmei::NumericalError& e) {
    return fail(TRMEI_ERR_NUMERICAL, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(TRMEI_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(TRMEI_ERR_RUNTIME, e.what());
  } catch (...) {
    return fail(TRMEI_ERR_RUNTIME, "unknown error");
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

#define TRMEI_REQUIRE(cond, msg) \
  if (!(cond)) return fail(TRMEI_ERR_INVALID_ARGUMENT, msg)

nlohmann::json run_echo(const trmei::Problem& problem, const std::string& method,
                        const trmei::OptimizerConfig& config) {
  return {{"problem", problem.name},
          {"dimension", problem.dimension()},
          {"bounds", {{"lower", std::vector<double>(problem.bounds.lower.begin(), problem.bounds.lower.end())},
                      {"upper", std::vector<double>(problem.bounds.upper.begin(), problem.bounds.upper.end())}}},
          {"method", method},
          {"config", trmei::config_to_json(config.resolve(problem.dimension()))}};
}

}  // namespace

extern "C" {

const char* trmei_version(void) { return "1.0.0"; }

const char* trmei_last_error(void) { return g_last_error.c_str(); }

void trmei_string_free(char* s) { delete[] s; }

trmei_status trmei_config_create(const char* json, trmei_config** out) {
  TRMEI_REQUIRE(out, "out is null");
  *out = nullptr;
  return guarded([&] {
    trmei::OptimizerConfig config;
    if (json) config = trmei::config_from_json(nlohmann::json::parse(json));
    config.validate();
    *out = new trmei_config{config};
  });
}

void trmei_config_destroy(trmei_config* config) { delete config; }

trmei_status trmei_config_to_json(const trmei_config* config, int dimension, char** out_json) {
  TRMEI_REQUIRE(config && out_json, "null argument");
  return guarded([&] {
    const trmei::OptimizerConfig c = dimension > 0 ? config->config.resolve(dimension) : config->config;
    *out_json = dup_string(trmei::config_to_json(c).dump(2));
  });
}

trmei_status trmei_problem_create_benchmark(const char* name, int dimension, double lower,
                                            double upper, trmei_problem** out) {
  TRMEI_REQUIRE(name && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new trmei_problem{trmei::make_benchmark(name, dimension, lower, upper)}; });
}

trmei_status trmei_problem_create_custom(const char* name, size_t dimension, const double* lower,
                                         const double* upper, size_t n_constraints,
                                         trmei_evaluate_fn fn, void* user_data,
                                         trmei_problem** out) {
  TRMEI_REQUIRE(name && lower && upper && fn && out, "null argument");
  TRMEI_REQUIRE(dimension > 0, "dimension must be positive");
  *out = nullptr;
  return guarded([&] {
    const auto d = static_cast<Eigen::Index>(dimension);
    trmei::Problem p;
    p.name = name;
    p.bounds = {Eigen::Map<const Eigen::VectorXd>(lower, d), Eigen::Map<const Eigen::VectorXd>(upper, d)};
    // One callback fills f and every g; cache the last point so the
    // per-function evaluators call it once per point.
    struct Cache {
      trmei_evaluate_fn fn;
      void* user;
      size_t n_g;
      Eigen::VectorXd x;
      double f = 0.0;
      std::vector<double> g;
    };
    auto cache = std::make_shared<Cache>(Cache{fn, user_data, n_constraints, {}, 0.0, {}});
    auto eval = [cache](const trmei::Point& x) {
      if (cache->x.size() != x.size() || cache->x != x) {
        cache->g.assign(cache->n_g, 0.0);
        double f = 0.0;
        const int rc = cache->fn(x.data(), static_cast<size_t>(x.size()), &f, cache->g.data(),
                                 cache->n_g, cache->user);
        if (rc != 0) {
          cache->x.resize(0);
          throw std::runtime_error("user evaluator returned " + std::to_string(rc));
        }
        cache->x = x;
        cache->f = f;
      }
    };
    p.objective = [cache, eval](const trmei::Point& x) {
      eval(x);
      return cache->f;
    };
    for (size_t j = 0; j < n_constraints; ++j) {
      p.constraints.push_back([cache, eval, j](const trmei::Point& x) {
        eval(x);
        return cache->g[j];
      });
    }
    p.validate();
    *out = new trmei_problem{std::move(p)};
  });
}

void trmei_problem_destroy(trmei_problem* problem) { delete problem; }

size_t trmei_problem_dimension(const trmei_problem* problem) {
  return problem ? static_cast<size_t>(problem->problem.dimension()) : 0;
}

size_t trmei_problem_constraint_count(const trmei_problem* problem) {
  return problem ? problem->problem.constraint_count() : 0;
}

trmei_status trmei_problem_evaluate(const trmei_problem* problem, const double* x, size_t dimension,
                                    double* f, double* g, size_t n_constraints) {
  TRMEI_REQUIRE(problem && x && f, "null argument");
  TRMEI_REQUIRE(dimension == static_cast<size_t>(problem->problem.dimension()), "dimension mismatch");
  TRMEI_REQUIRE(n_constraints == problem->problem.constraint_count(), "constraint count mismatch");
  TRMEI_REQUIRE(g || n_constraints == 0, "null constraint buffer");
  return guarded([&] {
    const auto e = problem->problem.evaluate(
        Eigen::Map<const Eigen::VectorXd>(x, static_cast<Eigen::Index>(dimension)));
    *f = e.f;
    std::copy(e.g.begin(), e.g.end(), g);
  });
}

trmei_status trmei_run(const trmei_problem* problem, const char* method, const trmei_config* config,
                       trmei_trace** out) {
  TRMEI_REQUIRE(problem && method && config && out, "null argument");
  *out = nullptr;
  try {
    trmei::RunTrace trace = trmei::run_method(method, problem->problem, config->config);
    *out = new trmei_trace{std::move(trace), run_echo(problem->problem, method, config->config)};
    return TRMEI_OK;
  } catch (const trmei::RunFailure& e) {
    *out = new trmei_trace{e.trace, run_echo(problem->problem, method, config->config)};
    return fail(TRMEI_ERR_RUNTIME, e.what());
  } catch (...) {
    return guarded([] { throw; });
  }
}

void trmei_trace_destroy(trmei_trace* trace) { delete trace; }

size_t trmei_trace_size(const trmei_trace* trace) { return trace ? trace->trace.records.size() : 0; }

trmei_status trmei_trace_record(const trmei_trace* trace, size_t i, trmei_record* out, double* x,
                                size_t x_len, double* g, size_t g_len) {
  TRMEI_REQUIRE(trace && out, "null argument");
  TRMEI_REQUIRE(i < trace->trace.records.size(), "record index out of range");
  const trmei::TraceRecord& r = trace->trace.records[i];
  TRMEI_REQUIRE(!x || x_len == static_cast<size_t>(r.x.size()), "x buffer length mismatch");
  TRMEI_REQUIRE(!g || g_len == r.g.size(), "g buffer length mismatch");
  *out = {r.index,
          r.feasible ? 1 : 0,
          r.f,
          r.incumbent_F,
          r.incumbent_index,
          r.incumbent_feasible ? 1 : 0,
          r.feasible_best ? 1 : 0,
          r.feasible_best.value_or(0.0)};
  if (x) std::copy(r.x.begin(), r.x.end(), x);
  if (g) std::copy(r.g.begin(), r.g.end(), g);
  return TRMEI_OK;
}

trmei_status trmei_trace_feasible_best_curve(const trmei_trace* trace, double worst_value,
                                             double* out, size_t len) {
  TRMEI_REQUIRE(trace && out, "null argument");
  TRMEI_REQUIRE(len == trace->trace.records.size(), "curve buffer length mismatch");
  return guarded([&] {
    const auto curve = trmei::feasible_best_curve(trace->trace, worst_value);
    std::copy(curve.begin(), curve.end(), out);
  });
}

trmei_status trmei_trace_to_json(const trmei_trace* trace, char** out_json) {
  TRMEI_REQUIRE(trace && out_json, "null argument");
  return guarded([&] {
    nlohmann::json j = trmei::trace_to_json(trace->trace);
    j["config"] = trace->echo;
    *out_json = dup_string(j.dump(1));
  });
}

trmei_status trmei_trace_write_outputs(const trmei_trace* trace, const trmei_config* config,
                                       const char* out_dir) {
  TRMEI_REQUIRE(trace && out_dir, "null argument");
  return guarded([&] {
    nlohmann::json echo = trace->echo;
    if (config) {
      echo["config"] =
          trmei::config_to_json(config->config.resolve(echo.value("dimension", 1)));
    }
    trmei::CampaignCell cell{trace->trace.problem, trace->trace.method, trace->trace.seed,
                             trace->trace, {}};
    trmei::write_campaign_outputs(trmei::aggregate({cell}), out_dir, echo);
  });
}

trmei_status trmei_campaign_run(const char* spec_json, trmei_campaign** out) {
  TRMEI_REQUIRE(spec_json && out, "null argument");
  *out = nullptr;
  return guarded([&] {
    trmei::CampaignSpec spec = trmei::campaign_spec_from_json(nlohmann::json::parse(spec_json));
    trmei::CampaignResult result = trmei::run_campaign(spec);
    *out = new trmei_campaign{std::move(spec), std::move(result)};
  });
}

void trmei_campaign_destroy(trmei_campaign* campaign) { delete campaign; }

trmei_status trmei_campaign_write(const trmei_campaign* campaign, const char* out_dir) {
  TRMEI_REQUIRE(campaign && out_dir, "null argument");
  return guarded([&] {
    trmei::write_campaign_outputs(campaign->result, out_dir,
                                  trmei::campaign_spec_to_json(campaign->spec));
  });
}

trmei_status trmei_campaign_summary_csv(const trmei_campaign* campaign, char** out_csv) {
  TRMEI_REQUIRE(campaign && out_csv, "null argument");
  return guarded([&] {
    *out_csv = dup_string(trmei::summary_csv(trmei::summarize(campaign->result),
                                             trmei::campaign_spec_to_json(campaign->spec)));
  });
}

size_t trmei_campaign_failed_cells(const trmei_campaign* campaign) {
  if (!campaign) return 0;
  size_t failed = 0;
  for (const auto& c : campaign->result.cells) failed += c.trace ? 0 : 1;
  return failed;
}

trmei_status trmei_campaign_resolved_spec(const trmei_campaign* campaign, char** out_json) {
  TRMEI_REQUIRE(campaign && out_json, "null argument");
  return guarded([&] { *out_json = dup_string(trmei::campaign_spec_to_json(campaign->spec).dump(2)); });
}

trmei_status trmei_plot_curves(const char* const* paths, size_t n_paths, const char* out_dir,
                               int log_y, size_t* n_written, int* dropped_points) {
  TRMEI_REQUIRE(paths && out_dir, "null argument");
  return guarded([&] {
    std::vector<std::filesystem::path> inputs;
    for (size_t i = 0; i < n_paths; ++i) inputs.emplace_back(paths[i]);
    const trmei::PlotOutcome outcome = trmei::plot_curve_files(inputs, out_dir, log_y != 0);
    if (n_written) *n_written = outcome.written.size();
    if (dropped_points) *dropped_points = outcome.dropped_points;
  });
}

double trmei_expected_improvement(double fstar, double mu, double sigma) {
  return trmei::expected_improvement(fstar, mu, sigma);
}

double trmei_violation_probability(double mu, double sigma) {
  return trmei::violation_probability(mu, sigma);
}

double trmei_penalized_value(double f, const double* g, size_t n_constraints, double big_m) {
  return trmei::penalized_value(f, std::span<const double>(g, g ? n_constraints : 0),
                                trmei::PenaltyConfig{big_m});
}

}  // extern "C"
