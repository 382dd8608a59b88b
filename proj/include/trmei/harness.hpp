#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "trmei/optimizer.hpp"

namespace trmei {

inline const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names{"random", "tr-mei", "tr-ts"};
  return names;
}

RunTrace run_method(const std::string& method, const Problem& problem, const OptimizerConfig& config);

struct CampaignSpec {
  std::vector<std::string> problems;
  int dimension = 20;
  double lower = kBenchmarkLower;
  double upper = kBenchmarkUpper;
  std::vector<std::string> methods;
  std::vector<std::uint64_t> seeds;
  OptimizerConfig config;
  // Per-method overrides of `config`; the seed is always taken from `seeds`.
  std::map<std::string, OptimizerConfig> method_configs;
  int workers = 1;

  void validate() const;
  OptimizerConfig config_for(const std::string& method, std::uint64_t seed) const;
};

struct CampaignCell {
  std::string problem;
  std::string method;
  std::uint64_t seed = 0;
  std::optional<RunTrace> trace;
  std::string error;  // set when the run failed
};

struct SummaryRow {
  std::string problem;
  std::string method;
  int n_seeds = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, n-1 denominator
  double se = 0.0;
  double median = 0.0;
};

struct MethodCurves {
  std::string problem;
  std::string method;
  std::vector<std::uint64_t> seeds;  // successful seeds, ascending
  // Feasible-best-so-far, one column per seed, one row per evaluation.
  Eigen::MatrixXd curves;
  Eigen::VectorXd finals;
};

struct CampaignResult {
  std::vector<CampaignCell> cells;  // sorted by (problem, method, seed)
  std::map<std::string, double> worst_value;  // per problem
  std::vector<MethodCurves> curves;            // sorted by (problem, method)
};

// Runs every (problem, method, seed) cell, then aggregates.
CampaignResult run_campaign(const CampaignSpec& spec);

// Aggregation step on already-run cells.
CampaignResult aggregate(std::vector<CampaignCell> cells);

// Worst objective value for one problem: the largest feasible f observed in
// any cell, or the largest f at all when nothing feasible was ever seen.
double worst_value_for(const std::vector<CampaignCell>& cells, const std::string& problem);

std::vector<double> feasible_best_curve(const RunTrace& trace, double worst_value);

SummaryRow summarize_values(const std::string& problem, const std::string& method,
                            std::span<const double> finals);
std::vector<SummaryRow> summarize(const CampaignResult& result);

// summary.csv, curves/<problem>_<method>.csv, traces/<problem>_<method>_<seed>.json.
// `config_echo` is embedded in every file.
void write_campaign_outputs(const CampaignResult& result, const std::filesystem::path& out_dir,
                            const nlohmann::json& config_echo);

std::string summary_csv(const std::vector<SummaryRow>& rows, const nlohmann::json& config_echo);
std::string curve_csv(const MethodCurves& curves, const nlohmann::json& config_echo);

nlohmann::json campaign_spec_to_json(const CampaignSpec& spec);
CampaignSpec campaign_spec_from_json(const nlohmann::json& j);

}  // namespace trmei
