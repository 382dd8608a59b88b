#include "trmei/trust_region.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "trmei/sampling.hpp"

namespace trmei {

TrustRegionSettings TrustRegionSettings::resolve(Eigen::Index d) const {
  TrustRegionSettings out = *this;
  const int dim = static_cast<int>(d);
  if (out.failure_tolerance <= 0) out.failure_tolerance = std::max(5, dim);
  if (out.n_candidates <= 0) out.n_candidates = std::min(100 * dim, 5000);
  if (out.perturb_probability <= 0.0) out.perturb_probability = std::min(20.0 / dim, 1.0);
  return out;
}

void TrustRegionSettings::validate() const {
  if (!(length_min > 0.0 && length_min <= length_init && length_init <= length_max)) {
    throw InputError("trust region lengths must satisfy 0 < min <= init <= max");
  }
  if (success_tolerance < 1) throw InputError("trust region success tolerance must be >= 1");
  if (failure_tolerance < 0) throw InputError("trust region failure tolerance must be >= 1");
  if (n_candidates < 0) throw InputError("candidate count must be positive");
  if (perturb_probability < 0.0 || perturb_probability > 1.0) {
    throw InputError("perturbation probability must lie in (0, 1]");
  }
}

TrustRegionState TrustRegionState::initial(const TrustRegionSettings& resolved, Point center) {
  TrustRegionState s;
  s.center = std::move(center);
  s.length = resolved.length_init;
  s.tau_success = resolved.success_tolerance;
  s.tau_failure = resolved.failure_tolerance;
  s.length_init = resolved.length_init;
  s.length_min = resolved.length_min;
  s.length_max = resolved.length_max;
  return s;
}

Box define_tr(const TrustRegionState& state, const Point& center,
              const Eigen::VectorXd& lengthscales) {
  if (lengthscales.size() != center.size()) {
    throw InputError("define_tr: lengthscale count does not match dimension");
  }
  if ((lengthscales.array() <= 0.0).any()) throw InputError("define_tr: lengthscales must be positive");
  const double log_geomean = lengthscales.array().log().mean();
  const Eigen::ArrayXd weights = (lengthscales.array().log() - log_geomean).exp();
  const Eigen::ArrayXd half = 0.5 * state.length * weights;
  Box box;
  box.lower = (center.array() - half).max(0.0).matrix();
  box.upper = (center.array() + half).min(1.0).matrix();
  return box;
}

CandidateBatch gen_candidates(const Box& box, const Point& center, Eigen::Index n_cand,
                              double p_perturb, std::uint64_t seed) {
  const Eigen::Index d = center.size();
  if (box.dimension() != d) throw InputError("gen_candidates: box and center differ in dimension");
  if (!(p_perturb > 0.0 && p_perturb <= 1.0)) {
    throw InputError("gen_candidates: p_perturb must lie in (0, 1]");
  }
  if (n_cand < 1) throw InputError("gen_candidates: need at least one candidate");

  std::mt19937_64 rng(seed);
  const PointBatch sobol = scrambled_sobol(n_cand, d, rng());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> pick(0, d - 1);

  CandidateBatch out;
  out.seed = seed;
  out.points = center.transpose().replicate(n_cand, 1);
  out.perturbed.setConstant(n_cand, d, false);
  const Eigen::ArrayXd span = (box.upper - box.lower).array();
  for (Eigen::Index i = 0; i < n_cand; ++i) {
    bool any = false;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (p_perturb >= 1.0 || unit(rng) < p_perturb) {
        out.perturbed(i, j) = true;
        any = true;
      }
    }
    if (!any) out.perturbed(i, pick(rng)) = true;
    for (Eigen::Index j = 0; j < d; ++j) {
      if (out.perturbed(i, j)) {
        out.points(i, j) = std::clamp(box.lower[j] + span[j] * sobol(i, j), box.lower[j], box.upper[j]);
      }
    }
  }
  return out;
}

TrustRegionState update_counters(TrustRegionState state, bool improved) {
  if (improved) {
    ++state.n_success;
    state.n_failure = 0;
  } else {
    ++state.n_failure;
    state.n_success = 0;
  }
  return state;
}

TrustRegionState adjust(TrustRegionState state) {
  if (state.n_success >= state.tau_success) {
    state.length = std::min(2.0 * state.length, state.length_max);
    state.n_success = 0;
  } else if (state.n_failure >= state.tau_failure) {
    state.length /= 2.0;
    state.n_failure = 0;
    if (state.length < state.length_min) state.restart_signaled = true;
  }
  return state;
}

TrustRegionState restart(TrustRegionState state, Point center) {
  state.center = std::move(center);
  state.length = state.length_init;
  state.n_success = 0;
  state.n_failure = 0;
  state.restart_signaled = false;
  return state;
}

}  // namespace trmei
