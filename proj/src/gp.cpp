#include "trmei/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "bounded_lbfgs.hpp"

namespace trmei {
namespace {

constexpr double kSqrt5 = 2.2360679774997896964;

// Unit-variance Matérn 5/2 as a function of the scaled distance r.
double matern52_unit(double r) {
  const double s = kSqrt5 * r;
  return (1.0 + s + s * s / 3.0) * std::exp(-s);
}

double scaled_distance(const Point& a, const Point& b, const Eigen::VectorXd& lengthscales) {
  return ((a - b).cwiseQuotient(lengthscales)).norm();
}

void check_params(const KernelParams& params, Eigen::Index dim) {
  if (params.lengthscales.size() != dim) {
    throw InputError("kernel has " + std::to_string(params.lengthscales.size()) +
                     " lengthscales for " + std::to_string(dim) + "-dimensional inputs");
  }
  if ((params.lengthscales.array() <= 0.0).any() || params.signal_variance <= 0.0 ||
      params.jitter < 0.0) {
    throw InputError("kernel parameters must be positive");
  }
}

// Lower Cholesky factor of K + jitter*I, or nullopt when not positive definite.
std::optional<Eigen::MatrixXd> try_cholesky(const Eigen::MatrixXd& k, double jitter) {
  Eigen::MatrixXd a = k;
  a.diagonal().array() += jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;
  Eigen::MatrixXd l = llt.matrixL();
  if (!l.allFinite() || (l.diagonal().array() <= 0.0).any()) return std::nullopt;
  return l;
}

}  // namespace

double matern52(const Point& x1, const Point& x2, const KernelParams& params) {
  if (x1.size() != x2.size()) throw InputError("matern52: points differ in dimension");
  check_params(params, x1.size());
  return params.signal_variance * matern52_unit(scaled_distance(x1, x2, params.lengthscales));
}

Eigen::MatrixXd kernel_matrix(const PointBatch& a, const PointBatch& b, const KernelParams& params) {
  if (a.cols() != b.cols()) throw InputError("kernel_matrix: batches differ in dimension");
  check_params(params, a.cols());
  const Eigen::RowVectorXd inv_ls = params.lengthscales.cwiseInverse().transpose();
  const Eigen::MatrixXd sa = a.array().rowwise() * inv_ls.array();
  const Eigen::MatrixXd sb = b.array().rowwise() * inv_ls.array();
  const Eigen::VectorXd na = sa.rowwise().squaredNorm();
  const Eigen::VectorXd nb = sb.rowwise().squaredNorm();
  Eigen::MatrixXd out = -2.0 * sa * sb.transpose();
  out.colwise() += na;
  out.rowwise() += nb.transpose();
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      out(i, j) = params.signal_variance * matern52_unit(std::sqrt(std::max(out(i, j), 0.0)));
    }
  }
  return out;
}

Standardization standardize(const Eigen::VectorXd& y) {
  Standardization s;
  s.shift = y.mean();
  if (y.size() < 2) {
    s.scale = 0.0;
    return s;
  }
  const double var = (y.array() - s.shift).square().sum() / static_cast<double>(y.size() - 1);
  const double scale = std::sqrt(var);
  s.scale = scale > 1e-12 * std::max(1.0, std::abs(s.shift)) ? scale : 0.0;
  return s;
}

LmlValue log_marginal_likelihood(const PointBatch& x, const Eigen::VectorXd& y,
                                 const KernelParams& params, bool with_gradient) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (y.size() != n) throw InputError("log_marginal_likelihood: x and y lengths differ");
  check_params(params, d);

  // Exact pairwise scaled distances; the expanded form in kernel_matrix loses
  // precision for near-duplicate rows, which matters for gradients.
  Eigen::MatrixXd r(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    r(j, j) = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      r(i, j) = r(j, i) = scaled_distance(x.row(i), x.row(j), params.lengthscales);
    }
  }
  const Eigen::MatrixXd k_signal =
      params.signal_variance * r.unaryExpr([](double v) { return matern52_unit(v); });
  Eigen::MatrixXd k = k_signal;
  k.diagonal().array() += params.jitter;
  Eigen::LLT<Eigen::MatrixXd> llt(k);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("log_marginal_likelihood: covariance not positive definite");
  }
  const Eigen::MatrixXd l = llt.matrixL();
  if ((l.diagonal().array() <= 0.0).any() || !l.allFinite()) {
    throw NumericalError("log_marginal_likelihood: covariance not positive definite");
  }
  const Eigen::VectorXd alpha = llt.solve(y);

  LmlValue out;
  out.value = -0.5 * y.dot(alpha) - l.diagonal().array().log().sum() -
              0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!with_gradient) return out;

  // dLML/dtheta = 0.5 tr(W dK/dtheta), W = alpha alpha^T - K^{-1}.
  const Eigen::MatrixXd w =
      alpha * alpha.transpose() - llt.solve(Eigen::MatrixXd::Identity(n, n));
  out.gradient = Eigen::VectorXd::Zero(d + 2);
  const Eigen::VectorXd inv_ls2 = params.lengthscales.array().square().inverse();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double s = kSqrt5 * r(i, j);
      // dk/dlog(l_m) = sigma^2 (5/3)(1 + s) e^{-s} (dx_m / l_m)^2
      const double weight =
          w(i, j) * params.signal_variance * (5.0 / 3.0) * (1.0 + s) * std::exp(-s);
      for (Eigen::Index m = 0; m < d; ++m) {
        const double diff = x(i, m) - x(j, m);
        out.gradient[m] += weight * diff * diff * inv_ls2[m];
      }
    }
  }
  // Off-diagonal pairs counted once above; the trace picks each twice, times 0.5.
  out.gradient[d] = 0.5 * (w.cwiseProduct(k_signal)).sum();
  out.gradient[d + 1] = 0.5 * params.jitter * w.trace();
  return out;
}

GpModel GpModel::condition(const PointBatch& x, const Eigen::VectorXd& y,
                           const KernelParams& params, double max_jitter) {
  if (x.rows() != y.size()) throw InputError("GpModel: x and y lengths differ");
  if (x.rows() < 1) throw InputError("GpModel: need at least one observation");
  check_params(params, x.cols());

  GpModel model;
  model.dim_ = static_cast<int>(x.cols());
  model.train_x_ = x;
  const Standardization st = standardize(y);
  model.y_shift_ = st.shift;
  model.y_scale_ = st.scale > 0.0 ? st.scale : 1.0;
  model.train_y_ = (y.array() - model.y_shift_) / model.y_scale_;
  model.params_ = params;

  const Eigen::MatrixXd k = kernel_matrix(x, x, params);
  double jitter = std::max(params.jitter, 1e-12);
  while (true) {
    if (auto l = try_cholesky(k, jitter)) {
      model.chol_ = std::move(*l);
      break;
    }
    jitter *= 10.0;
    if (jitter > max_jitter * (1.0 + 1e-9)) {
      throw NumericalError("GpModel: Cholesky failed after jitter escalation to " +
                           std::to_string(max_jitter));
    }
  }
  model.params_.jitter = jitter;
  model.alpha_ = model.chol_.triangularView<Eigen::Lower>().solve(model.train_y_);
  model.chol_.triangularView<Eigen::Lower>().transpose().solveInPlace(model.alpha_);
  model.lml_ = -0.5 * model.train_y_.dot(model.alpha_) -
               model.chol_.diagonal().array().log().sum() -
               0.5 * static_cast<double>(x.rows()) * std::log(2.0 * std::numbers::pi);
  return model;
}

GpModel GpModel::fit(const PointBatch& x, const Eigen::VectorXd& y, const GpFitOptions& options) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (y.size() != n) throw InputError("GpModel::fit: x and y lengths differ");
  if (n < 2) throw InputError("GpModel::fit: need at least two observations");
  if (d < 1) throw InputError("GpModel::fit: zero-dimensional inputs");
  if (options.restarts < 1) throw InputError("GpModel::fit: restarts must be >= 1");
  const HyperparameterBounds& b = options.bounds;

  const Standardization st = standardize(y);
  if (st.scale == 0.0) {
    GpModel model;
    model.dim_ = static_cast<int>(d);
    model.prior_only_ = true;
    model.y_shift_ = st.shift;
    model.y_scale_ = 1.0;
    model.params_.lengthscales = Eigen::VectorXd::Constant(d, 1.0);
    model.params_.signal_variance = b.signal_variance_min;
    model.params_.jitter = b.jitter_min;
    return model;
  }
  const Eigen::VectorXd ys = (y.array() - st.shift) / st.scale;

  Eigen::VectorXd lower(d + 2), upper(d + 2);
  lower.head(d).setConstant(std::log(b.lengthscale_min));
  upper.head(d).setConstant(std::log(b.lengthscale_max));
  lower[d] = std::log(b.signal_variance_min);
  upper[d] = std::log(b.signal_variance_max);
  lower[d + 1] = std::log(b.jitter_min);
  upper[d + 1] = options.fit_jitter ? std::log(b.jitter_max) : lower[d + 1];

  auto unpack = [d](const Eigen::VectorXd& theta) {
    KernelParams p;
    p.lengthscales = theta.head(d).array().exp();
    p.signal_variance = std::exp(theta[d]);
    p.jitter = std::exp(theta[d + 1]);
    return p;
  };
  const detail::ObjectiveWithGradient negative_lml = [&](const Eigen::VectorXd& theta,
                                                         Eigen::VectorXd& grad) {
    try {
      const LmlValue v = trmei::log_marginal_likelihood(x, ys, unpack(theta), true);
      grad = -v.gradient;
      return -v.value;
    } catch (const NumericalError&) {
      grad = Eigen::VectorXd::Zero(theta.size());
      return std::numeric_limits<double>::infinity();
    }
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::VectorXd best_theta;
  double best_value = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < options.restarts; ++restart) {
    Eigen::VectorXd start(d + 2);
    if (restart == 0) {
      // Deterministic first start: moderate lengthscales relative to the unit cube diagonal.
      start.head(d).setConstant(std::log(0.5 * std::sqrt(static_cast<double>(d))));
      start[d] = 0.0;
      start[d + 1] = std::log(1e-6);
    } else {
      for (Eigen::Index i = 0; i < d + 2; ++i) {
        start[i] = lower[i] + unit(rng) * (upper[i] - lower[i]);
      }
    }
    start = start.cwiseMax(lower).cwiseMin(upper);
    const detail::BoundedMinimum result =
        detail::minimize_bounded(negative_lml, start, lower, upper, options.max_iterations);
    if (result.value < best_value) {
      best_value = result.value;
      best_theta = result.x;
    }
  }
  if (!std::isfinite(best_value)) {
    // Every start was numerically infeasible; fall back to the largest jitter.
    best_theta = Eigen::VectorXd(d + 2);
    best_theta.head(d).setConstant(std::log(0.5 * std::sqrt(static_cast<double>(d))));
    best_theta[d] = 0.0;
    best_theta[d + 1] = std::log(b.jitter_min);
  }
  return condition(x, y, unpack(best_theta), b.jitter_max);
}

void GpModel::check_dimension(Eigen::Index cols) const {
  if (cols != dim_) {
    throw InputError("GpModel: query has dimension " + std::to_string(cols) + ", model has " +
                     std::to_string(dim_));
  }
}

Prediction GpModel::predict(const Point& x) const {
  check_dimension(x.size());
  Eigen::VectorXd mean, variance;
  predict_batch(x.transpose(), mean, variance);
  return {mean[0], variance[0]};
}

void GpModel::predict_batch(const PointBatch& xs, Eigen::VectorXd& mean,
                            Eigen::VectorXd& variance) const {
  check_dimension(xs.cols());
  const Eigen::Index m = xs.rows();
  if (prior_only_) {
    mean = Eigen::VectorXd::Constant(m, y_shift_);
    variance = Eigen::VectorXd::Constant(m, params_.signal_variance * y_scale_ * y_scale_);
    return;
  }
  const Eigen::MatrixXd k_star = kernel_matrix(train_x_, xs, params_);  // n x m
  const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(k_star);
  mean = (k_star.transpose() * alpha_).array() * y_scale_ + y_shift_;
  variance = (params_.signal_variance - v.colwise().squaredNorm().transpose().array())
                 .max(0.0) *
             (y_scale_ * y_scale_);
}

Eigen::VectorXd GpModel::sample_posterior(const PointBatch& xs, std::uint64_t seed) const {
  check_dimension(xs.cols());
  const Eigen::Index m = xs.rows();
  if (m == 0) throw InputError("sample_posterior: empty batch");

  Eigen::VectorXd mean;
  Eigen::MatrixXd cov = kernel_matrix(xs, xs, params_);
  if (prior_only_) {
    mean = Eigen::VectorXd::Zero(m);
  } else {
    const Eigen::MatrixXd k_star = kernel_matrix(train_x_, xs, params_);
    const Eigen::MatrixXd v = chol_.triangularView<Eigen::Lower>().solve(k_star);
    mean = k_star.transpose() * alpha_;
    cov.noalias() -= v.transpose() * v;
  }
  std::optional<Eigen::MatrixXd> l;
  for (double jitter = 1e-10; jitter <= 1e-2 * (1.0 + 1e-9); jitter *= 10.0) {
    if ((l = try_cholesky(cov, jitter * params_.signal_variance))) break;
  }
  if (!l) throw NumericalError("sample_posterior: joint covariance not positive definite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z[i] = normal(rng);
  const Eigen::VectorXd sample = mean + l->triangularView<Eigen::Lower>() * z;
  return (sample.array() * y_scale_ + y_shift_).matrix();
}

}  // namespace trmei
