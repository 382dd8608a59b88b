#pragma once

#include <span>
#include <vector>

#include "trmei/gp.hpp"

namespace trmei {

// Big-M penalty. big_m is in standardized objective units when used with
// penalized_moments, and in whatever units f carries for penalized_value.
struct PenaltyConfig {
  double big_m = 10.0;
};

struct PenalizedPosterior {
  double mu_f = 0.0;
  double sigma2_f = 0.0;
  std::vector<double> p_violation;
  double mu_F = 0.0;
  double sigma2_F = 0.0;
};

// P(Y_g > 0) for Y_g ~ N(mu_g, sigma_g^2); a point mass when sigma_g == 0.
double violation_probability(double mu_g, double sigma_g);

// Moments of Y_F = Y_f + M * sum_j 1{Y_gj > 0} from given component moments.
// mu_f and sigma2_f are in standardized objective units.
PenalizedPosterior combine_moments(double mu_f, double sigma2_f, std::span<const double> p_violation,
                                   const PenaltyConfig& cfg);

// Objective moments are taken in the objective model's standardized units;
// violation probabilities use each constraint model in its original units.
PenalizedPosterior penalized_moments(const GpModel& objective, std::span<const GpModel> constraints,
                                     const Point& x, const PenaltyConfig& cfg);

// Batch form of penalized_moments; returns (mu_F, sigma2_F) per row.
void penalized_moments_batch(const GpModel& objective, std::span<const GpModel> constraints,
                             const PointBatch& xs, const PenaltyConfig& cfg,
                             Eigen::VectorXd& mu_F, Eigen::VectorXd& sigma2_F);

int violation_count(std::span<const double> g);

// F = f + M * #{j : g_j > 0}. g_j == 0 is feasible.
double penalized_value(double f, std::span<const double> g, const PenaltyConfig& cfg);

}  // namespace trmei
