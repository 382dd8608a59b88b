#include "trmei/acquisition.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "trmei/normal.hpp"

namespace trmei {
namespace {

// z*Phi(z) + phi(z). For very negative z the direct form cancels, so use
// phi(z) * (1 - t*R(t)) with t = -z and R the Mills ratio via continued fraction.
double tail_factor(double t) {
  double tail = t;
  for (int k = 60; k >= 1; --k) tail = t + k / tail;
  return 1.0 - t / tail;
}

double ei_unit(double z) {
  if (z > -6.0) return z * normal_cdf(z) + normal_pdf(z);
  return normal_pdf(z) * tail_factor(-z);
}

double log_ei_unit(double z) {
  if (z > -6.0) return std::log(ei_unit(z));
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(tail_factor(-z));
}

}  // namespace

double expected_improvement(double fstar, double mu, double sigma) {
  const double gain = fstar - mu;
  if (!(sigma >= kSigmaFloor)) return std::max(0.0, gain);
  return std::max(0.0, sigma * ei_unit(gain / sigma));
}

double log_expected_improvement(double fstar, double mu, double sigma) {
  const double gain = fstar - mu;
  if (!(sigma >= kSigmaFloor)) {
    return gain > 0.0 ? std::log(gain) : -std::numeric_limits<double>::infinity();
  }
  return std::log(sigma) + log_ei_unit(gain / sigma);
}

double mei(const Incumbent& incumbent, const PenalizedPosterior& posterior) {
  return expected_improvement(incumbent.best_F, posterior.mu_F, std::sqrt(posterior.sigma2_F));
}

BatchScores score_batch(const Incumbent& incumbent, const GpModel& objective,
                        std::span<const GpModel> constraints, const PointBatch& candidates,
                        const PenaltyConfig& cfg) {
  if (candidates.rows() == 0) throw InputError("score_batch: empty candidate batch");
  Eigen::VectorXd mu, var;
  penalized_moments_batch(objective, constraints, candidates, cfg, mu, var);
  BatchScores out;
  out.scores.resize(candidates.rows());
  // Rank in log space: far from the incumbent every score can underflow to 0.
  double best_log = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
    const double sigma = std::sqrt(var[i]);
    out.scores[i] = expected_improvement(incumbent.best_F, mu[i], sigma);
    const double log_score = log_expected_improvement(incumbent.best_F, mu[i], sigma);
    if (log_score > best_log) {
      best_log = log_score;
      out.argmax = i;
    }
  }
  return out;
}

}  // namespace trmei
