#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "trmei/acquisition.hpp"
#include "trmei/gp.hpp"
#include "trmei/problems.hpp"
#include "trmei/trust_region.hpp"

namespace trmei {

struct OptimizerConfig {
  int n_init = 0;  // 0 -> 2 d
  int budget = 50;  // evaluations after the initial design
  // big_m is in units of the initial design's objective standard deviation.
  PenaltyConfig penalty;
  TrustRegionSettings trust_region;
  GpFitOptions gp;
  // Candidate cap for the Thompson-sampling baseline (joint sampling is cubic).
  int ts_max_candidates = 1000;
  std::uint64_t seed = 0;

  // Defaults materialized for a problem of dimension d.
  OptimizerConfig resolve(Eigen::Index d) const;
  void validate() const;
};

struct TraceRecord {
  int index = 0;
  Point x;
  double f = 0.0;
  std::vector<double> g;
  bool feasible = false;
  double incumbent_F = 0.0;  // penalized value of the incumbent, objective units
  int incumbent_index = 0;
  bool incumbent_feasible = false;
  std::optional<double> feasible_best;  // none until a feasible point is seen
};

struct RunTrace {
  std::string problem;
  std::string method;
  std::uint64_t seed = 0;
  int n_init = 0;
  int budget = 0;
  // big_m expressed in objective units, frozen after the initial design.
  double penalty_raw = 0.0;
  int restarts = 0;
  std::vector<TraceRecord> records;

  const TraceRecord& incumbent() const;
};

// Problem evaluation or model failure mid-run, with the partial trace.
class RunFailure : public std::runtime_error {
 public:
  RunFailure(const std::string& what, RunTrace partial)
      : std::runtime_error(what), trace(std::move(partial)) {}
  RunTrace trace;
};

struct IterationInfo {
  int iteration = 0;  // 0-based post-init step
  Box region;         // trust region in [0,1]^d
  const PointBatch* candidates = nullptr;  // [0,1]^d
  Eigen::VectorXd scores;                  // MEI, or sampled objective for TS
  Eigen::Index chosen = 0;
  Point chosen_point;  // original units
  double region_length = 0.0;
};
using IterationHook = std::function<void(const IterationInfo&)>;

PointBatch initial_design_for(const Problem& problem, const OptimizerConfig& resolved);

// Trust-region optimization with the penalized expected improvement.
RunTrace run(const Problem& problem, const OptimizerConfig& config, const IterationHook& hook = {});

// Same loop, candidates chosen by joint posterior Thompson samples.
RunTrace run_ts_baseline(const Problem& problem, const OptimizerConfig& config,
                         const IterationHook& hook = {});

// Initial design followed by uniform random points.
RunTrace run_random_baseline(const Problem& problem, const OptimizerConfig& config);

// Index chosen by the Thompson rule: argmin sampled f among candidates whose
// sampled constraints are all <= 0, else fewest sampled violations, then
// smallest total sampled violation. First index wins ties.
Eigen::Index thompson_select(const Eigen::VectorXd& f_sample,
                             const std::vector<Eigen::VectorXd>& g_samples);

// "Improvement" for the trust-region counters.
bool is_improvement(double new_F, double incumbent_F);

}  // namespace trmei
