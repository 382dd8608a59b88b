#pragma once

#include <cstdint>
#include <optional>

#include "trmei/common.hpp"

namespace trmei {

// Matérn 5/2 kernel hyperparameters. Lengthscales are in normalized-input
// units; signal variance and jitter are in standardized output units.
struct KernelParams {
  Eigen::VectorXd lengthscales;
  double signal_variance = 1.0;
  double jitter = 1e-8;
};

struct HyperparameterBounds {
  double lengthscale_min = 1e-3;
  double lengthscale_max = 1e2;
  double signal_variance_min = 1e-4;
  double signal_variance_max = 1e4;
  double jitter_min = 1e-8;
  double jitter_max = 1e-2;
};

struct GpFitOptions {
  HyperparameterBounds bounds;
  int restarts = 5;
  int max_iterations = 200;
  // When false the jitter is pinned at bounds.jitter_min and only escalated
  // on Cholesky failure.
  bool fit_jitter = true;
  std::uint64_t seed = 0;
};

double matern52(const Point& x1, const Point& x2, const KernelParams& params);

// Cross-covariance, rows of `a` against rows of `b`.
Eigen::MatrixXd kernel_matrix(const PointBatch& a, const PointBatch& b, const KernelParams& params);

struct LmlValue {
  double value = 0.0;
  // d LML / d log(theta) with theta = (lengthscales..., signal_variance, jitter).
  Eigen::VectorXd gradient;
};

// Log marginal likelihood of zero-mean GP data (y already standardized).
// Throws NumericalError if K + jitter*I is not positive definite.
LmlValue log_marginal_likelihood(const PointBatch& x, const Eigen::VectorXd& y,
                                 const KernelParams& params, bool with_gradient);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

// Zero-mean GP regression on inputs in [0,1]^d. Immutable after construction;
// predictions are reported in the original output units.
class GpModel {
 public:
  // Hyperparameters by multi-start bounded quasi-Newton on log-parameters.
  static GpModel fit(const PointBatch& x, const Eigen::VectorXd& y, const GpFitOptions& options);

  // Fixed hyperparameters. Jitter escalates x10 up to `max_jitter` on
  // Cholesky failure, then NumericalError.
  static GpModel condition(const PointBatch& x, const Eigen::VectorXd& y,
                           const KernelParams& params, double max_jitter = 1e-2);

  Prediction predict(const Point& x) const;
  void predict_batch(const PointBatch& xs, Eigen::VectorXd& mean, Eigen::VectorXd& variance) const;

  // One draw from the joint posterior over the rows of xs.
  Eigen::VectorXd sample_posterior(const PointBatch& xs, std::uint64_t seed) const;

  const KernelParams& params() const { return params_; }
  const PointBatch& train_x() const { return train_x_; }
  const Eigen::VectorXd& train_y() const { return train_y_; }
  const Eigen::MatrixXd& cholesky() const { return chol_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double y_shift() const { return y_shift_; }
  double y_scale() const { return y_scale_; }
  int dimension() const { return dim_; }
  // True when outputs were constant and the model holds only the prior.
  bool prior_only() const { return prior_only_; }
  // LML of the standardized training data under params(); 0 for prior-only.
  double log_marginal_likelihood() const { return lml_; }

 private:
  GpModel() = default;

  void check_dimension(Eigen::Index cols) const;

  KernelParams params_;
  PointBatch train_x_;
  Eigen::VectorXd train_y_;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  double y_shift_ = 0.0;
  double y_scale_ = 1.0;
  double lml_ = 0.0;
  int dim_ = 0;
  bool prior_only_ = false;
};

// Standardization used by fit(): mean and sample standard deviation (n-1).
// The scale is 0 for constant data.
struct Standardization {
  double shift = 0.0;
  double scale = 1.0;
};
Standardization standardize(const Eigen::VectorXd& y);

}  // namespace trmei
