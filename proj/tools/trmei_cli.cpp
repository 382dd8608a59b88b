// trmei command-line front end. Talks to the library only through trmei.h.
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trmei/trmei.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Owns a string returned through the C API.
struct CString {
  char* p = nullptr;
  ~CString() { trmei_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Destroy(p); }
};
using ConfigHandle = Handle<trmei_config, trmei_config_destroy>;
using ProblemHandle = Handle<trmei_problem, trmei_problem_destroy>;
using TraceHandle = Handle<trmei_trace, trmei_trace_destroy>;
using CampaignHandle = Handle<trmei_campaign, trmei_campaign_destroy>;

std::string env_name(const std::string& flag) {
  std::string out = "TRMEI_";
  for (const char c : flag) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return out;
}

// Algorithm settings shared by `run` and `campaign`. Only flags that were
// given (on the command line or through TRMEI_* variables) reach the config
// JSON; the library supplies every other default.
class AlgorithmFlags {
 public:
  void attach(CLI::App& app) {
    app.add_option("--config", config_file_, "JSON file with base algorithm settings")
        ->check(CLI::ExistingFile)
        ->envname(env_name("config"));
    add(app, "n-init", {"n_init"}, n_init_, "initial design size (default 2*dim)");
    add(app, "budget", {"budget"}, budget_, "evaluations after the initial design (default 50)");
    add(app, "big-m", {"big_m"}, big_m_,
        "penalty per violated constraint, in initial-design objective std units (default 10)");
    add(app, "tr-length-init", {"trust_region", "length_init"}, length_init_, "default 0.8");
    add(app, "tr-length-min", {"trust_region", "length_min"}, length_min_, "default 0.5^7");
    add(app, "tr-length-max", {"trust_region", "length_max"}, length_max_, "default 1.6");
    add(app, "tr-success-tol", {"trust_region", "success_tolerance"}, success_tol_, "default 3");
    add(app, "tr-failure-tol", {"trust_region", "failure_tolerance"}, failure_tol_,
        "default max(5, dim)");
    add(app, "n-cand", {"trust_region", "n_candidates"}, n_cand_, "default min(100*dim, 5000)");
    add(app, "p-perturb", {"trust_region", "perturb_probability"}, p_perturb_,
        "default min(20/dim, 1)");
    add(app, "gp-restarts", {"gp", "restarts"}, gp_restarts_, "default 5");
    add(app, "gp-max-iter", {"gp", "max_iterations"}, gp_max_iter_, "default 200");
    add(app, "gp-fit-jitter", {"gp", "fit_jitter"}, gp_fit_jitter_, "default true");
    add(app, "lengthscale-min", {"gp", "lengthscale_min"}, ls_min_, "default 1e-3");
    add(app, "lengthscale-max", {"gp", "lengthscale_max"}, ls_max_, "default 1e2");
    add(app, "signal-var-min", {"gp", "signal_variance_min"}, sv_min_, "default 1e-4");
    add(app, "signal-var-max", {"gp", "signal_variance_max"}, sv_max_, "default 1e4");
    add(app, "jitter-min", {"gp", "jitter_min"}, jitter_min_, "default 1e-8");
    add(app, "jitter-max", {"gp", "jitter_max"}, jitter_max_, "default 1e-2");
    add(app, "ts-max-cand", {"ts_max_candidates"}, ts_max_cand_,
        "candidate cap for tr-ts (default 1000)");
  }

  json to_json() const {
    json j = json::object();
    if (!config_file_.empty()) {
      std::ifstream in(config_file_);
      j = json::parse(in, nullptr, false);
      if (j.is_discarded() || !j.is_object()) {
        throw UsageError("--config: " + config_file_ + " is not a JSON object");
      }
    }
    for (const auto& setter : setters_) setter(j);
    if (j.contains("budget") && j["budget"].is_number_integer() && j["budget"].get<long>() < 0) {
      throw UsageError("--budget must be >= 0");
    }
    return j;
  }

 private:
  template <typename T>
  void add(CLI::App& app, const std::string& flag, std::vector<std::string> path, T& target,
           const std::string& help) {
    CLI::Option* opt = app.add_option("--" + flag, target, help)->envname(env_name(flag));
    setters_.push_back([opt, path, &target](json& j) {
      if (opt->count() == 0) return;
      json* node = &j;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &(*node)[path[i]];
      (*node)[path.back()] = target;
    });
  }

  std::string config_file_;
  int n_init_ = 0, budget_ = 50, success_tol_ = 3, failure_tol_ = 0, n_cand_ = 0;
  int gp_restarts_ = 5, gp_max_iter_ = 200, ts_max_cand_ = 1000;
  double big_m_ = 10.0, length_init_ = 0.8, length_min_ = 0.0078125, length_max_ = 1.6;
  double p_perturb_ = 0.0, ls_min_ = 1e-3, ls_max_ = 1e2, sv_min_ = 1e-4, sv_max_ = 1e4;
  double jitter_min_ = 1e-8, jitter_max_ = 1e-2;
  bool gp_fit_jitter_ = true;
  std::vector<std::function<void(json&)>> setters_;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, sep);) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// "0..29", "1,4,9", or a mix such as "0..4,10".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  for (const auto& part : split(text, ',')) {
    try {
      const auto dots = part.find("..");
      if (dots == std::string::npos) {
        seeds.push_back(std::stoull(part));
        continue;
      }
      const auto lo = std::stoull(part.substr(0, dots));
      const auto hi = std::stoull(part.substr(dots + 2));
      if (hi < lo) throw UsageError("--seeds: empty range '" + part + "'");
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } catch (const std::logic_error&) {
      throw UsageError("--seeds: cannot parse '" + part + "'");
    }
  }
  if (seeds.empty()) throw UsageError("--seeds: no seeds given");
  std::set<std::uint64_t> seen;
  for (const auto s : seeds) {
    if (!seen.insert(s).second) throw UsageError("--seeds: duplicate seed " + std::to_string(s));
  }
  return seeds;
}

// Maps a library status to an exit code, printing the library message.
int report(trmei_status status, const std::string& context) {
  std::cerr << "trmei " << context << ": " << trmei_last_error() << "\n";
  return status == TRMEI_ERR_INVALID_ARGUMENT ? kExitUsage : kExitRuntime;
}

struct RunOptions {
  AlgorithmFlags algo;
  std::string problem;
  std::string method = "tr-mei";
  int dim = 20;
  double lower = -5.0, upper = 10.0;
  std::uint64_t seed = 0;
  std::string out;
  bool print_config = false;
};

int cmd_run(const RunOptions& o) {
  json cfg = o.algo.to_json();
  cfg["seed"] = o.seed;
  ConfigHandle config;
  if (auto s = trmei_config_create(cfg.dump().c_str(), &config.p)) return report(s, "run");
  if (o.print_config) {
    CString text;
    if (auto s = trmei_config_to_json(config.p, o.dim, &text.p)) return report(s, "run");
    const json echo{{"problem", o.problem}, {"dimension", o.dim}, {"bounds", {o.lower, o.upper}},
                    {"method", o.method}, {"config", json::parse(text.str())}};
    std::cout << echo.dump(2) << "\n";
    return kExitOk;
  }
  if (o.out.empty()) throw UsageError("--out is required");
  ProblemHandle problem;
  if (auto s = trmei_problem_create_benchmark(o.problem.c_str(), o.dim, o.lower, o.upper, &problem.p)) {
    return report(s, "run");
  }
  TraceHandle trace;
  const trmei_status status = trmei_run(problem.p, o.method.c_str(), config.p, &trace.p);
  if (status != TRMEI_OK) {
    const int code = report(status, "run");
    if (trace.p) trmei_trace_write_outputs(trace.p, config.p, o.out.c_str());
    return code;
  }
  if (auto s = trmei_trace_write_outputs(trace.p, config.p, o.out.c_str())) return report(s, "run");

  trmei_record last{};
  trmei_trace_record(trace.p, trmei_trace_size(trace.p) - 1, &last, nullptr, 0, nullptr, 0);
  std::cout << o.problem << " " << o.method << " seed=" << o.seed
            << " evaluations=" << trmei_trace_size(trace.p) << " incumbent_F=" << last.incumbent_F
            << " feasible_best=";
  if (last.has_feasible_best) {
    std::cout << last.feasible_best;
  } else {
    std::cout << "none";
  }
  std::cout << "\n";
  return kExitOk;
}

struct CampaignOptions {
  AlgorithmFlags algo;
  std::string problems;
  std::string methods = "tr-mei,tr-ts,random";
  std::string seeds = "0..29";
  int dim = 20;
  double lower = -5.0, upper = 10.0;
  int workers = 1;
  std::string out;
  bool print_config = false;
};

int cmd_campaign(const CampaignOptions& o) {
  const json spec{{"problems", split(o.problems, ',')},
                  {"methods", split(o.methods, ',')},
                  {"seeds", parse_seeds(o.seeds)},
                  {"dimension", o.dim},
                  {"bounds", {o.lower, o.upper}},
                  {"workers", o.workers},
                  {"config", o.algo.to_json()}};
  if (spec["problems"].empty()) throw UsageError("--problems: no problem names given");
  if (o.print_config) {
    ConfigHandle config;
    if (auto s = trmei_config_create(spec["config"].dump().c_str(), &config.p)) {
      return report(s, "campaign");
    }
    CString text;
    if (auto s = trmei_config_to_json(config.p, o.dim, &text.p)) return report(s, "campaign");
    json echo = spec;
    echo["config"] = json::parse(text.str());
    std::cout << echo.dump(2) << "\n";
    return kExitOk;
  }
  if (o.out.empty()) throw UsageError("--out is required");
  CampaignHandle campaign;
  if (auto s = trmei_campaign_run(spec.dump().c_str(), &campaign.p)) return report(s, "campaign");
  if (auto s = trmei_campaign_write(campaign.p, o.out.c_str())) return report(s, "campaign");
  CString csv;
  if (auto s = trmei_campaign_summary_csv(campaign.p, &csv.p)) return report(s, "campaign");
  std::cout << csv.str();
  if (const size_t failed = trmei_campaign_failed_cells(campaign.p)) {
    std::cerr << "trmei campaign: " << failed << " run(s) failed; see traces/*.json\n";
    return kExitRuntime;
  }
  return kExitOk;
}

struct PlotOptions {
  std::vector<std::string> inputs;
  std::string in_dir;
  std::string out;
  bool log_y = false;
};

int cmd_plot(const PlotOptions& o) {
  std::vector<std::string> inputs = o.inputs;
  if (!o.in_dir.empty()) {
    if (!fs::is_directory(o.in_dir)) {
      std::cerr << "trmei plot: missing input directory " << o.in_dir << "\n";
      return kExitRuntime;
    }
    for (const auto& entry : fs::directory_iterator(o.in_dir)) {
      if (entry.path().extension() == ".csv") inputs.push_back(entry.path().string());
    }
    std::sort(inputs.begin(), inputs.end());
  }
  if (inputs.empty()) throw UsageError("plot: give curve CSV files or --in DIR");
  std::vector<const char*> paths;
  for (const auto& p : inputs) paths.push_back(p.c_str());
  size_t written = 0;
  int dropped = 0;
  const trmei_status status =
      trmei_plot_curves(paths.data(), paths.size(), o.out.c_str(), o.log_y ? 1 : 0, &written, &dropped);
  if (status != TRMEI_OK) {
    std::cerr << "trmei plot: " << trmei_last_error() << "\n";
    return kExitRuntime;
  }
  if (dropped > 0) {
    std::cerr << "trmei plot: warning: dropped " << dropped << " nonpositive point(s) under --log-y\n";
  }
  std::cout << "wrote " << written << " plot(s) to " << o.out << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region Bayesian optimization with big-M penalized expected improvement"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(trmei_version()));

  RunOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "Run one optimization and write its trace and curve");
  run->add_option("--problem", run_opts.problem, "ackley | levy | rastrigin")
      ->required()
      ->envname(env_name("problem"));
  run->add_option("--method", run_opts.method, "tr-mei | tr-ts | random")
      ->check(CLI::IsMember({"tr-mei", "tr-ts", "random"}))
      ->envname(env_name("method"));
  run->add_option("--dim", run_opts.dim, "problem dimension")
      ->check(CLI::PositiveNumber)
      ->envname(env_name("dim"));
  run->add_option("--lower", run_opts.lower, "box lower bound")->envname(env_name("lower"));
  run->add_option("--upper", run_opts.upper, "box upper bound")->envname(env_name("upper"));
  run->add_option("--seed", run_opts.seed, "random seed")->envname(env_name("seed"));
  run->add_option("--out", run_opts.out, "output directory")->envname(env_name("out"));
  run->add_flag("--print-config", run_opts.print_config, "print the resolved configuration and exit");
  run_opts.algo.attach(*run);

  CampaignOptions camp_opts;
  CLI::App* campaign = app.add_subcommand("campaign", "Run problems x methods x seeds and aggregate");
  campaign->add_option("--problems", camp_opts.problems, "comma-separated problem names")
      ->required()
      ->envname(env_name("problems"));
  campaign->add_option("--methods", camp_opts.methods, "comma-separated methods")
      ->envname(env_name("methods"));
  campaign->add_option("--seeds", camp_opts.seeds, "seed list, e.g. 0..29 or 1,2,5")
      ->envname(env_name("seeds"));
  campaign->add_option("--dim", camp_opts.dim, "problem dimension")
      ->check(CLI::PositiveNumber)
      ->envname(env_name("dim"));
  campaign->add_option("--lower", camp_opts.lower, "box lower bound")->envname(env_name("lower"));
  campaign->add_option("--upper", camp_opts.upper, "box upper bound")->envname(env_name("upper"));
  campaign->add_option("--workers", camp_opts.workers, "parallel runs")
      ->check(CLI::PositiveNumber)
      ->envname(env_name("workers"));
  campaign->add_option("--out", camp_opts.out, "output directory")->envname(env_name("out"));
  campaign->add_flag("--print-config", camp_opts.print_config,
                     "print the resolved configuration and exit");
  camp_opts.algo.attach(*campaign);

  PlotOptions plot_opts;
  CLI::App* plot = app.add_subcommand("plot", "Render convergence curves as SVG");
  plot->add_option("inputs", plot_opts.inputs, "curve CSV files");
  plot->add_option("--in", plot_opts.in_dir, "directory of curve CSV files")->envname(env_name("in"));
  plot->add_option("--out", plot_opts.out, "output directory")->required()->envname(env_name("out"));
  plot->add_flag("--log-y", plot_opts.log_y, "logarithmic y axis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*run) return cmd_run(run_opts);
    if (*campaign) return cmd_campaign(camp_opts);
    return cmd_plot(plot_opts);
  } catch (const UsageError& e) {
    std::cerr << "trmei: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "trmei: " << e.what() << "\n";
    return kExitRuntime;
  }
}
