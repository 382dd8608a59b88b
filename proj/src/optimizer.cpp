#include "trmei/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "trmei/sampling.hpp"

namespace trmei {

OptimizerConfig OptimizerConfig::resolve(Eigen::Index d) const {
  OptimizerConfig out = *this;
  if (out.n_init <= 0) out.n_init = 2 * static_cast<int>(d);
  out.n_init = std::max(out.n_init, 2);
  out.trust_region = trust_region.resolve(d);
  return out;
}

void OptimizerConfig::validate() const {
  if (n_init != 0 && n_init < 2) throw InputError("n_init must be >= 2");
  if (budget < 0) throw InputError("budget must be >= 0");
  if (!(penalty.big_m > 0.0)) throw InputError("big-M must be positive");
  if (gp.restarts < 1) throw InputError("GP restarts must be >= 1");
  if (ts_max_candidates < 1) throw InputError("ts_max_candidates must be >= 1");
  trust_region.validate();
}

const TraceRecord& RunTrace::incumbent() const {
  if (records.empty()) throw InputError("empty trace has no incumbent");
  return records.back();
}

bool is_improvement(double new_F, double incumbent_F) {
  return new_F < incumbent_F - std::max(1e-3 * std::abs(incumbent_F), 1e-6);
}

PointBatch initial_design_for(const Problem& problem, const OptimizerConfig& resolved) {
  return initial_design(problem.bounds, resolved.n_init, resolved.seed);
}

namespace {

// Observation history plus the trace that mirrors it.
class History {
 public:
  History(const Problem& problem, const OptimizerConfig& cfg, std::string method)
      : problem_(problem) {
    trace_.problem = problem.name;
    trace_.method = std::move(method);
    trace_.seed = cfg.seed;
    trace_.n_init = cfg.n_init;
    trace_.budget = cfg.budget;
    big_m_ = cfg.penalty.big_m;
  }

  void evaluate(const Point& x) {
    Evaluation e;
    try {
      e = problem_.evaluate(x);
    } catch (const std::exception& ex) {
      throw RunFailure(std::string("problem evaluation failed: ") + ex.what(), trace_);
    }
    if (!std::isfinite(e.f) ||
        std::any_of(e.g.begin(), e.g.end(), [](double v) { return !std::isfinite(v); })) {
      throw RunFailure("problem evaluation returned a non-finite value", trace_);
    }
    xs_.push_back(x);
    units_.push_back(to_unit(problem_.bounds, x));
    f_.push_back(e.f);
    g_.push_back(e.g);
    counts_.push_back(violation_count(e.g));
    if (penalty_ready_) append_record();
  }

  // Freezes the raw-unit big-M from the initial design and emits its records.
  void finish_initial_design() {
    const Eigen::Map<const Eigen::VectorXd> f(f_.data(), static_cast<Eigen::Index>(f_.size()));
    const Standardization st = standardize(f);
    trace_.penalty_raw = big_m_ * (st.scale > 0.0 ? st.scale : 1.0);
    penalty_ready_ = true;
    for (std::size_t i = 0; i < f_.size(); ++i) append_record(i);
  }

  double F(std::size_t i) const { return f_[i] + trace_.penalty_raw * counts_[i]; }
  std::size_t incumbent() const { return incumbent_; }
  double incumbent_F() const { return F(incumbent_); }
  std::size_t size() const { return f_.size(); }
  bool feasible(std::size_t i) const { return counts_[i] == 0; }
  const Point& unit_point(std::size_t i) const { return units_[i]; }

  PointBatch unit_batch() const {
    PointBatch out(static_cast<Eigen::Index>(units_.size()), problem_.dimension());
    for (std::size_t i = 0; i < units_.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = units_[i];
    return out;
  }
  Eigen::VectorXd objective_values() const {
    return Eigen::Map<const Eigen::VectorXd>(f_.data(), static_cast<Eigen::Index>(f_.size()));
  }
  Eigen::VectorXd constraint_values(std::size_t j) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(g_.size()));
    for (std::size_t i = 0; i < g_.size(); ++i) out[static_cast<Eigen::Index>(i)] = g_[i][j];
    return out;
  }

  RunTrace& trace() { return trace_; }

 private:
  void append_record(std::size_t i = std::numeric_limits<std::size_t>::max()) {
    if (i == std::numeric_limits<std::size_t>::max()) i = f_.size() - 1;
    if (i == 0 || F(i) < F(incumbent_)) incumbent_ = i;
    if (counts_[i] == 0 && (!feasible_best_ || f_[i] < *feasible_best_)) feasible_best_ = f_[i];
    TraceRecord r;
    r.index = static_cast<int>(i);
    r.x = xs_[i];
    r.f = f_[i];
    r.g = g_[i];
    r.feasible = counts_[i] == 0;
    r.incumbent_F = F(incumbent_);
    r.incumbent_index = static_cast<int>(incumbent_);
    r.incumbent_feasible = counts_[incumbent_] == 0;
    r.feasible_best = feasible_best_;
    trace_.records.push_back(std::move(r));
  }

  const Problem& problem_;
  RunTrace trace_;
  double big_m_ = 10.0;
  bool penalty_ready_ = false;
  std::vector<Point> xs_, units_;
  std::vector<double> f_;
  std::vector<std::vector<double>> g_;
  std::vector<int> counts_;
  std::size_t incumbent_ = 0;
  std::optional<double> feasible_best_;
};

struct Surrogates {
  GpModel objective;
  std::vector<GpModel> constraints;
};

Surrogates fit_surrogates(History& history, const Problem& problem, const GpFitOptions& base,
                          std::mt19937_64& rng) {
  const PointBatch x = history.unit_batch();
  GpFitOptions opts = base;
  try {
    opts.seed = rng();
    Surrogates s{GpModel::fit(x, history.objective_values(), opts), {}};
    for (std::size_t j = 0; j < problem.constraint_count(); ++j) {
      opts.seed = rng();
      s.constraints.push_back(GpModel::fit(x, history.constraint_values(j), opts));
    }
    return s;
  } catch (const NumericalError& e) {
    throw RunFailure(std::string("surrogate fit failed: ") + e.what(), history.trace());
  }
}

Eigen::VectorXd region_lengthscales(const GpModel& objective) {
  return objective.prior_only()
             ? Eigen::VectorXd::Ones(objective.dimension())
             : objective.params().lengthscales;
}

enum class Selection { kMei, kThompson };

RunTrace run_trust_region(const Problem& problem, const OptimizerConfig& config,
                          const IterationHook& hook, Selection selection) {
  problem.validate();
  config.validate();
  const OptimizerConfig cfg = config.resolve(problem.dimension());
  History history(problem, cfg, selection == Selection::kMei ? "tr-mei" : "tr-ts");

  const PointBatch design = initial_design_for(problem, cfg);
  for (Eigen::Index i = 0; i < design.rows(); ++i) history.evaluate(design.row(i).transpose());
  history.finish_initial_design();

  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  TrustRegionState tr = TrustRegionState::initial(
      cfg.trust_region, history.unit_point(history.incumbent()));
  const Eigen::Index n_cand = selection == Selection::kMei
                                  ? cfg.trust_region.n_candidates
                                  : std::min(cfg.trust_region.n_candidates, cfg.ts_max_candidates);

  for (int step = 0; step < cfg.budget; ++step) {
    const Surrogates models = fit_surrogates(history, problem, cfg.gp, rng);
    const std::size_t inc = history.incumbent();
    const double incumbent_F = history.incumbent_F();
    tr.center = history.unit_point(inc);

    const Box region = define_tr(tr, tr.center, region_lengthscales(models.objective));
    const CandidateBatch cands = gen_candidates(region, tr.center, n_cand,
                                                cfg.trust_region.perturb_probability, rng());

    IterationInfo info;
    info.iteration = step;
    info.region = region;
    info.candidates = &cands.points;
    info.region_length = tr.length;
    if (selection == Selection::kMei) {
      // Objective-scale penalty and F* expressed in the objective model's standardized units.
      const double scale = models.objective.y_scale();
      const PenaltyConfig penalty{history.trace().penalty_raw / scale};
      const Incumbent incumbent{(incumbent_F - models.objective.y_shift()) / scale, tr.center,
                                history.feasible(inc)};
      BatchScores scored =
          score_batch(incumbent, models.objective, models.constraints, cands.points, penalty);
      info.scores = std::move(scored.scores);
      info.chosen = scored.argmax;
    } else {
      try {
        const Eigen::VectorXd f_sample = models.objective.sample_posterior(cands.points, rng());
        std::vector<Eigen::VectorXd> g_samples;
        for (const GpModel& g : models.constraints) {
          g_samples.push_back(g.sample_posterior(cands.points, rng()));
        }
        info.chosen = thompson_select(f_sample, g_samples);
        info.scores = f_sample;
      } catch (const NumericalError& e) {
        throw RunFailure(std::string("posterior sampling failed: ") + e.what(), history.trace());
      }
    }
    const Point unit_next = cands.points.row(info.chosen).transpose();
    info.chosen_point = from_unit(problem.bounds, unit_next)
                            .cwiseMax(problem.bounds.lower)
                            .cwiseMin(problem.bounds.upper);
    if (hook) hook(info);

    history.evaluate(info.chosen_point);
    const bool improved = is_improvement(history.F(history.size() - 1), incumbent_F);
    tr = adjust(update_counters(tr, improved));
    if (tr.restart_signaled) {
      tr = restart(tr, history.unit_point(history.incumbent()));
      ++history.trace().restarts;
    }
  }
  return std::move(history.trace());
}

}  // namespace

RunTrace run(const Problem& problem, const OptimizerConfig& config, const IterationHook& hook) {
  return run_trust_region(problem, config, hook, Selection::kMei);
}

RunTrace run_ts_baseline(const Problem& problem, const OptimizerConfig& config,
                         const IterationHook& hook) {
  return run_trust_region(problem, config, hook, Selection::kThompson);
}

RunTrace run_random_baseline(const Problem& problem, const OptimizerConfig& config) {
  problem.validate();
  config.validate();
  const OptimizerConfig cfg = config.resolve(problem.dimension());
  History history(problem, cfg, "random");
  const PointBatch design = initial_design_for(problem, cfg);
  for (Eigen::Index i = 0; i < design.rows(); ++i) history.evaluate(design.row(i).transpose());
  history.finish_initial_design();

  std::mt19937_64 rng(cfg.seed ^ 0x2545f4914f6cdd1dULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int step = 0; step < cfg.budget; ++step) {
    Point u(problem.dimension());
    for (Eigen::Index j = 0; j < u.size(); ++j) u[j] = unit(rng);
    history.evaluate(from_unit(problem.bounds, u));
  }
  return std::move(history.trace());
}

Eigen::Index thompson_select(const Eigen::VectorXd& f_sample,
                             const std::vector<Eigen::VectorXd>& g_samples) {
  const Eigen::Index m = f_sample.size();
  if (m == 0) throw InputError("thompson_select: empty sample");
  for (const auto& g : g_samples) {
    if (g.size() != m) throw InputError("thompson_select: sample lengths differ");
  }
  // Lexicographic key: (violations, total violation, sampled f).
  auto key = [&](Eigen::Index i) {
    int violations = 0;
    double total = 0.0;
    for (const auto& g : g_samples) {
      if (g[i] > 0.0) {
        ++violations;
        total += g[i];
      }
    }
    return std::tuple{violations, violations == 0 ? 0.0 : total, violations == 0 ? f_sample[i] : 0.0};
  };
  Eigen::Index best = 0;
  auto best_key = key(0);
  for (Eigen::Index i = 1; i < m; ++i) {
    const auto k = key(i);
    if (k < best_key) {
      best_key = k;
      best = i;
    }
  }
  return best;
}

}  // namespace trmei
