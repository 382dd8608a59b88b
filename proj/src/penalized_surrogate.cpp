#include "trmei/penalized_surrogate.hpp"

#include <cmath>

#include "trmei/normal.hpp"

namespace trmei {

double violation_probability(double mu_g, double sigma_g) {
  if (!(sigma_g > 0.0)) return mu_g > 0.0 ? 1.0 : 0.0;
  // 1 - Phi(-mu/sigma) == Phi(mu/sigma), the latter without cancellation.
  return normal_cdf(mu_g / sigma_g);
}

PenalizedPosterior combine_moments(double mu_f, double sigma2_f, std::span<const double> p_violation,
                                   const PenaltyConfig& cfg) {
  PenalizedPosterior out;
  out.mu_f = mu_f;
  out.sigma2_f = std::max(sigma2_f, 0.0);
  out.p_violation.assign(p_violation.begin(), p_violation.end());
  double p_sum = 0.0;
  double bernoulli_var = 0.0;
  for (const double p : p_violation) {
    p_sum += p;
    bernoulli_var += p * (1.0 - p);
  }
  out.mu_F = mu_f + cfg.big_m * p_sum;
  out.sigma2_F = out.sigma2_f + cfg.big_m * cfg.big_m * bernoulli_var;
  return out;
}

PenalizedPosterior penalized_moments(const GpModel& objective, std::span<const GpModel> constraints,
                                     const Point& x, const PenaltyConfig& cfg) {
  const Prediction pf = objective.predict(x);
  const double scale = objective.y_scale();
  std::vector<double> p(constraints.size());
  for (std::size_t j = 0; j < constraints.size(); ++j) {
    const Prediction pg = constraints[j].predict(x);
    p[j] = violation_probability(pg.mean, std::sqrt(pg.variance));
  }
  return combine_moments((pf.mean - objective.y_shift()) / scale, pf.variance / (scale * scale), p,
                         cfg);
}

void penalized_moments_batch(const GpModel& objective, std::span<const GpModel> constraints,
                             const PointBatch& xs, const PenaltyConfig& cfg,
                             Eigen::VectorXd& mu_F, Eigen::VectorXd& sigma2_F) {
  Eigen::VectorXd mean, var;
  objective.predict_batch(xs, mean, var);
  const double scale = objective.y_scale();
  mu_F = (mean.array() - objective.y_shift()) / scale;
  sigma2_F = var / (scale * scale);
  for (const GpModel& g : constraints) {
    Eigen::VectorXd gm, gv;
    g.predict_batch(xs, gm, gv);
    for (Eigen::Index i = 0; i < xs.rows(); ++i) {
      const double p = violation_probability(gm[i], std::sqrt(gv[i]));
      mu_F[i] += cfg.big_m * p;
      sigma2_F[i] += cfg.big_m * cfg.big_m * p * (1.0 - p);
    }
  }
}

int violation_count(std::span<const double> g) {
  int count = 0;
  for (const double v : g) count += v > 0.0 ? 1 : 0;
  return count;
}

double penalized_value(double f, std::span<const double> g, const PenaltyConfig& cfg) {
  return f + cfg.big_m * violation_count(g);
}

}  // namespace trmei
