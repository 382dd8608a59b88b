#include "trmei/serialization.hpp"

#include <set>

namespace trmei {
namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw InputError(where + " must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InputError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad value for '") + key + "': " + e.what());
  }
}

}  // namespace

json config_to_json(const OptimizerConfig& c) {
  const TrustRegionSettings& tr = c.trust_region;
  const HyperparameterBounds& b = c.gp.bounds;
  return json{
      {"n_init", c.n_init},
      {"budget", c.budget},
      {"big_m", c.penalty.big_m},
      {"seed", c.seed},
      {"ts_max_candidates", c.ts_max_candidates},
      {"trust_region",
       {{"length_init", tr.length_init},
        {"length_min", tr.length_min},
        {"length_max", tr.length_max},
        {"success_tolerance", tr.success_tolerance},
        {"failure_tolerance", tr.failure_tolerance},
        {"n_candidates", tr.n_candidates},
        {"perturb_probability", tr.perturb_probability}}},
      {"gp",
       {{"restarts", c.gp.restarts},
        {"max_iterations", c.gp.max_iterations},
        {"fit_jitter", c.gp.fit_jitter},
        {"lengthscale_min", b.lengthscale_min},
        {"lengthscale_max", b.lengthscale_max},
        {"signal_variance_min", b.signal_variance_min},
        {"signal_variance_max", b.signal_variance_max},
        {"jitter_min", b.jitter_min},
        {"jitter_max", b.jitter_max}}},
  };
}

OptimizerConfig config_from_json(const json& j, OptimizerConfig c) {
  reject_unknown(j, {"n_init", "budget", "big_m", "seed", "ts_max_candidates", "trust_region", "gp"},
                 "config");
  read(j, "n_init", c.n_init);
  read(j, "budget", c.budget);
  read(j, "big_m", c.penalty.big_m);
  read(j, "seed", c.seed);
  read(j, "ts_max_candidates", c.ts_max_candidates);
  if (j.contains("trust_region")) {
    const json& t = j.at("trust_region");
    reject_unknown(t,
                   {"length_init", "length_min", "length_max", "success_tolerance",
                    "failure_tolerance", "n_candidates", "perturb_probability"},
                   "trust_region");
    TrustRegionSettings& tr = c.trust_region;
    read(t, "length_init", tr.length_init);
    read(t, "length_min", tr.length_min);
    read(t, "length_max", tr.length_max);
    read(t, "success_tolerance", tr.success_tolerance);
    read(t, "failure_tolerance", tr.failure_tolerance);
    read(t, "n_candidates", tr.n_candidates);
    read(t, "perturb_probability", tr.perturb_probability);
  }
  if (j.contains("gp")) {
    const json& g = j.at("gp");
    reject_unknown(g,
                   {"restarts", "max_iterations", "fit_jitter", "lengthscale_min",
                    "lengthscale_max", "signal_variance_min", "signal_variance_max", "jitter_min",
                    "jitter_max"},
                   "gp");
    read(g, "restarts", c.gp.restarts);
    read(g, "max_iterations", c.gp.max_iterations);
    read(g, "fit_jitter", c.gp.fit_jitter);
    HyperparameterBounds& b = c.gp.bounds;
    read(g, "lengthscale_min", b.lengthscale_min);
    read(g, "lengthscale_max", b.lengthscale_max);
    read(g, "signal_variance_min", b.signal_variance_min);
    read(g, "signal_variance_max", b.signal_variance_max);
    read(g, "jitter_min", b.jitter_min);
    read(g, "jitter_max", b.jitter_max);
  }
  return c;
}

json trace_to_json(const RunTrace& trace) {
  json records = json::array();
  for (const TraceRecord& r : trace.records) {
    records.push_back({
        {"index", r.index},
        {"x", std::vector<double>(r.x.data(), r.x.data() + r.x.size())},
        {"f", r.f},
        {"g", r.g},
        {"feasible", r.feasible},
        {"incumbent_F", r.incumbent_F},
        {"incumbent_index", r.incumbent_index},
        {"incumbent_feasible", r.incumbent_feasible},
        {"feasible_best", r.feasible_best ? json(*r.feasible_best) : json(nullptr)},
    });
  }
  return json{{"problem", trace.problem}, {"method", trace.method},
              {"seed", trace.seed},       {"n_init", trace.n_init},
              {"budget", trace.budget},   {"penalty_raw", trace.penalty_raw},
              {"restarts", trace.restarts}, {"records", std::move(records)}};
}

}  // namespace trmei
