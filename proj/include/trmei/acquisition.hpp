#pragma once

#include <span>
#include <vector>

#include "trmei/penalized_surrogate.hpp"

namespace trmei {

struct Incumbent {
  double best_F = 0.0;  // penalized, standardized objective units
  Point best_point;
  bool is_feasible = false;
};

// Below this the posterior is treated as a point mass.
inline constexpr double kSigmaFloor = 1e-12;

// Closed-form expected improvement for minimization, E[max(0, fstar - Y)].
double expected_improvement(double fstar, double mu, double sigma);

// log of expected_improvement, finite wherever the true value is positive.
double log_expected_improvement(double fstar, double mu, double sigma);

// Expected improvement of the penalized surrogate over F*.
double mei(const Incumbent& incumbent, const PenalizedPosterior& posterior);

struct BatchScores {
  Eigen::VectorXd scores;
  // First index attaining the maximum; ranked by log-EI so that candidates
  // whose scores underflow to 0 are still ordered.
  Eigen::Index argmax = 0;
};

BatchScores score_batch(const Incumbent& incumbent, const GpModel& objective,
                        std::span<const GpModel> constraints, const PointBatch& candidates,
                        const PenaltyConfig& cfg);

}  // namespace trmei
