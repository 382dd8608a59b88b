#include "trmei/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <set>
#include <thread>

#include <fmt/format.h>

#include "trmei/serialization.hpp"

namespace trmei {

namespace fs = std::filesystem;
using nlohmann::json;

RunTrace run_method(const std::string& method, const Problem& problem, const OptimizerConfig& config) {
  if (method == "tr-mei") return run(problem, config);
  if (method == "tr-ts") return run_ts_baseline(problem, config);
  if (method == "random") return run_random_baseline(problem, config);
  throw InputError("unknown method '" + method + "' (expected tr-mei, tr-ts or random)");
}

void CampaignSpec::validate() const {
  if (problems.empty()) throw InputError("campaign needs at least one problem");
  if (methods.empty()) throw InputError("campaign needs at least one method");
  if (seeds.empty()) throw InputError("campaign needs at least one seed");
  if (std::set(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw InputError("campaign seeds must be pairwise distinct");
  }
  if (std::set(problems.begin(), problems.end()).size() != problems.size()) {
    throw InputError("campaign problems must be distinct");
  }
  if (std::set(methods.begin(), methods.end()).size() != methods.size()) {
    throw InputError("campaign methods must be distinct");
  }
  for (const auto& p : problems) make_benchmark(p, dimension, lower, upper);
  for (const auto& m : methods) {
    if (std::find(method_names().begin(), method_names().end(), m) == method_names().end()) {
      throw InputError("unknown method '" + m + "'");
    }
  }
  if (workers < 1) throw InputError("workers must be >= 1");
  config.validate();
  for (const auto& [m, c] : method_configs) c.validate();
}

OptimizerConfig CampaignSpec::config_for(const std::string& method, std::uint64_t seed) const {
  const auto it = method_configs.find(method);
  OptimizerConfig c = it == method_configs.end() ? config : it->second;
  c.seed = seed;
  return c;
}

double worst_value_for(const std::vector<CampaignCell>& cells, const std::string& problem) {
  double worst_feasible = -std::numeric_limits<double>::infinity();
  double worst_any = -std::numeric_limits<double>::infinity();
  for (const CampaignCell& cell : cells) {
    if (cell.problem != problem || !cell.trace) continue;
    for (const TraceRecord& r : cell.trace->records) {
      worst_any = std::max(worst_any, r.f);
      if (r.feasible) worst_feasible = std::max(worst_feasible, r.f);
    }
  }
  return std::isfinite(worst_feasible) ? worst_feasible : worst_any;
}

std::vector<double> feasible_best_curve(const RunTrace& trace, double worst_value) {
  std::vector<double> out;
  out.reserve(trace.records.size());
  double best = worst_value;
  bool seen = false;
  for (const TraceRecord& r : trace.records) {
    if (r.feasible && (!seen || r.f < best)) {
      best = r.f;
      seen = true;
    }
    out.push_back(best);
  }
  return out;
}

CampaignResult aggregate(std::vector<CampaignCell> cells) {
  std::sort(cells.begin(), cells.end(), [](const CampaignCell& a, const CampaignCell& b) {
    return std::tie(a.problem, a.method, a.seed) < std::tie(b.problem, b.method, b.seed);
  });
  CampaignResult result;
  for (const CampaignCell& c : cells) {
    if (!result.worst_value.count(c.problem)) {
      result.worst_value[c.problem] = worst_value_for(cells, c.problem);
    }
  }
  for (std::size_t begin = 0; begin < cells.size();) {
    std::size_t end = begin;
    while (end < cells.size() && cells[end].problem == cells[begin].problem &&
           cells[end].method == cells[begin].method) {
      ++end;
    }
    MethodCurves mc;
    mc.problem = cells[begin].problem;
    mc.method = cells[begin].method;
    const double worst = result.worst_value[mc.problem];
    std::vector<std::vector<double>> columns;
    for (std::size_t i = begin; i < end; ++i) {
      if (!cells[i].trace) continue;
      mc.seeds.push_back(cells[i].seed);
      columns.push_back(feasible_best_curve(*cells[i].trace, worst));
    }
    std::size_t rows = 0;
    for (const auto& col : columns) rows = std::max(rows, col.size());
    mc.curves = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(rows),
                                          static_cast<Eigen::Index>(columns.size()), worst);
    mc.finals.resize(static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
      for (std::size_t t = 0; t < columns[k].size(); ++t) {
        mc.curves(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = columns[k][t];
      }
      mc.finals[static_cast<Eigen::Index>(k)] = columns[k].empty() ? worst : columns[k].back();
    }
    result.curves.push_back(std::move(mc));
    begin = end;
  }
  result.cells = std::move(cells);
  return result;
}

CampaignResult run_campaign(const CampaignSpec& spec) {
  spec.validate();
  std::vector<CampaignCell> cells;
  for (const auto& p : spec.problems) {
    for (const auto& m : spec.methods) {
      for (const auto s : spec.seeds) cells.push_back({p, m, s, std::nullopt, {}});
    }
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      CampaignCell& cell = cells[i];
      try {
        const Problem problem = make_benchmark(cell.problem, spec.dimension, spec.lower, spec.upper);
        cell.trace = run_method(cell.method, problem, spec.config_for(cell.method, cell.seed));
      } catch (const std::exception& e) {
        cell.error = e.what();
      }
    }
  };
  const int n_threads = std::min<int>(spec.workers, static_cast<int>(cells.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return aggregate(std::move(cells));
}

SummaryRow summarize_values(const std::string& problem, const std::string& method,
                            std::span<const double> finals) {
  SummaryRow row{problem, method, static_cast<int>(finals.size())};
  if (finals.empty()) {
    row.mean = row.std = row.se = row.median = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  // Sorting first makes the sums independent of seed order.
  std::vector<double> sorted(finals.begin(), finals.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sum = 0.0;
  for (const double v : sorted) sum += v;
  row.mean = sum / n;
  double ss = 0.0;
  for (const double v : sorted) ss += (v - row.mean) * (v - row.mean);
  row.std = sorted.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  row.se = row.std / std::sqrt(n);
  const std::size_t mid = sorted.size() / 2;
  row.median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  return row;
}

std::vector<SummaryRow> summarize(const CampaignResult& result) {
  std::vector<SummaryRow> rows;
  for (const MethodCurves& mc : result.curves) {
    rows.push_back(summarize_values(
        mc.problem, mc.method,
        std::span<const double>(mc.finals.data(), static_cast<std::size_t>(mc.finals.size()))));
  }
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.problem, a.method) < std::tie(b.problem, b.method);
  });
  return rows;
}

namespace {

std::string num(double v) { return fmt::format("{:.10g}", v); }

std::string config_line(const json& config_echo) { return "# config=" + config_echo.dump() + "\n"; }

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string summary_csv(const std::vector<SummaryRow>& rows, const json& config_echo) {
  std::string out = config_line(config_echo);
  out += "problem,method,n_seeds,mean,std,se,median\n";
  for (const SummaryRow& r : rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", r.problem, r.method, r.n_seeds, num(r.mean),
                       num(r.std), num(r.se), num(r.median));
  }
  return out;
}

std::string curve_csv(const MethodCurves& mc, const json& config_echo) {
  std::string out = config_line(config_echo);
  out += "eval_index,mean,se,median";
  for (const auto s : mc.seeds) out += fmt::format(",seed_{}", s);
  out += "\n";
  for (Eigen::Index t = 0; t < mc.curves.rows(); ++t) {
    std::vector<double> row(static_cast<std::size_t>(mc.curves.cols()));
    for (Eigen::Index k = 0; k < mc.curves.cols(); ++k) row[static_cast<std::size_t>(k)] = mc.curves(t, k);
    const SummaryRow s = summarize_values(mc.problem, mc.method, row);
    out += fmt::format("{},{},{},{}", t + 1, num(s.mean), num(s.se), num(s.median));
    for (const double v : row) out += "," + num(v);
    out += "\n";
  }
  return out;
}

void write_campaign_outputs(const CampaignResult& result, const fs::path& out_dir,
                            const json& config_echo) {
  fs::create_directories(out_dir / "curves");
  fs::create_directories(out_dir / "traces");
  write_file(out_dir / "summary.csv", summary_csv(summarize(result), config_echo));
  for (const MethodCurves& mc : result.curves) {
    write_file(out_dir / "curves" / (mc.problem + "_" + mc.method + ".csv"), curve_csv(mc, config_echo));
  }
  for (const CampaignCell& cell : result.cells) {
    json j = cell.trace ? trace_to_json(*cell.trace) : json{{"problem", cell.problem},
                                                              {"method", cell.method},
                                                              {"seed", cell.seed}};
    if (!cell.error.empty()) j["error"] = cell.error;
    j["config"] = config_echo;
    write_file(out_dir / "traces" / fmt::format("{}_{}_{}.json", cell.problem, cell.method, cell.seed),
               j.dump(1) + "\n");
  }
}

json campaign_spec_to_json(const CampaignSpec& spec) {
  json methods = json::object();
  for (const auto& m : spec.methods) {
    json c = config_to_json(spec.config_for(m, 0).resolve(spec.dimension));
    c.erase("seed");  // per-cell, from "seeds"
    methods[m] = std::move(c);
  }
  return json{{"problems", spec.problems}, {"dimension", spec.dimension},
              {"bounds", {spec.lower, spec.upper}}, {"methods", spec.methods},
              {"seeds", spec.seeds},       {"workers", spec.workers},
              {"config", config_to_json(spec.config)}, {"method_configs", methods}};
}

CampaignSpec campaign_spec_from_json(const json& j) {
  CampaignSpec spec;
  try {
    spec.problems = j.at("problems").get<std::vector<std::string>>();
    spec.methods = j.at("methods").get<std::vector<std::string>>();
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("dimension")) spec.dimension = j.at("dimension").get<int>();
    if (j.contains("workers")) spec.workers = j.at("workers").get<int>();
    if (j.contains("bounds")) {
      const auto b = j.at("bounds").get<std::vector<double>>();
      if (b.size() != 2) throw InputError("bounds must be [lower, upper]");
      spec.lower = b[0];
      spec.upper = b[1];
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed campaign spec: ") + e.what());
  }
  if (j.contains("config")) spec.config = config_from_json(j.at("config"));
  if (j.contains("method_configs")) {
    for (const auto& [m, c] : j.at("method_configs").items()) {
      spec.method_configs[m] = config_from_json(c, spec.config);
    }
  }
  return spec;
}

}  // namespace trmei
