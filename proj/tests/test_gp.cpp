#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "trmei/gp.hpp"

using namespace trmei;

namespace {

struct Data {
  PointBatch x;
  Eigen::VectorXd y;
};

Data make_data(int n, int d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Data out{PointBatch(n, d), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < d; ++j) out.x(i, j) = u(rng);
    out.y[i] = std::sin(6.0 * out.x(i, 0)) + out.x.row(i).squaredNorm() + 0.1 * u(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("matern52 known values") {
  KernelParams p{Eigen::VectorXd::Ones(1), 1.0, 0.0};
  Point a(1), b(1);
  a << 0.0;
  b << 1.0;
  CHECK(matern52(a, a, p) == doctest::Approx(1.0));
  // (1 + sqrt5 + 5/3) exp(-sqrt5)
  CHECK(matern52(a, b, p) == doctest::Approx(0.523994108831820).epsilon(1e-13));
  p.signal_variance = 2.5;
  CHECK(matern52(a, b, p) == doctest::Approx(2.5 * 0.523994108831820).epsilon(1e-13));
}

TEST_CASE("kernel matrix matches the naive oracle") {
  std::mt19937_64 rng(3);
  const Data d = make_data(7, 3, rng);
  Eigen::VectorXd ls(3);
  ls << 0.3, 0.7, 1.4;
  const Eigen::MatrixXd k = kernel_matrix(d.x, d.x, {ls, 1.7, 0.0});
  const Eigen::MatrixXd ref = oracle::gram(d.x, d.x, ls, 1.7);
  CHECK((k - ref).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("posterior matches full-inversion oracle") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 1 + trial % 4;
    const Data data = make_data(5 + trial, d, rng);
    Eigen::VectorXd ls = Eigen::VectorXd::Constant(d, 0.4 + 0.05 * trial);
    const KernelParams params{ls, 1.3, 1e-6};
    const GpModel gp = GpModel::condition(data.x, data.y, params);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int q = 0; q < 5; ++q) {
      Point x(d);
      for (int j = 0; j < d; ++j) x[j] = u(rng);
      const Prediction got = gp.predict(x);
      const auto ref = oracle::gp_predict(data.x, data.y, ls, 1.3, 1e-6, x);
      CHECK(got.mean == doctest::Approx(ref.mean).epsilon(1e-8));
      CHECK(std::abs(got.variance - ref.variance) < 1e-8 * std::max(1.0, ref.variance));
    }
  }
}

TEST_CASE("interpolates training points with tiny jitter") {
  std::mt19937_64 rng(5);
  const Data data = make_data(8, 2, rng);
  const GpModel gp = GpModel::condition(data.x, data.y, {Eigen::VectorXd::Constant(2, 0.3), 1.0, 1e-10});
  for (int i = 0; i < 8; ++i) {
    const Prediction p = gp.predict(data.x.row(i).transpose());
    CHECK(p.mean == doctest::Approx(data.y[i]).epsilon(1e-6));
    CHECK(p.variance < 1e-6);
  }
}

TEST_CASE("far from data the posterior reverts to the prior") {
  PointBatch x(2, 1);
  x << 0.0, 0.05;
  Eigen::VectorXd y(2);
  y << 1.0, 3.0;
  const GpModel gp = GpModel::condition(x, y, {Eigen::VectorXd::Constant(1, 0.01), 1.0, 1e-8});
  Point q(1);
  q << 0.9;
  const Prediction p = gp.predict(q);
  CHECK(p.mean == doctest::Approx(gp.y_shift()).epsilon(1e-9));
  CHECK(p.variance == doctest::Approx(gp.y_scale() * gp.y_scale()).epsilon(1e-9));
}

TEST_CASE("log marginal likelihood and its gradient") {
  std::mt19937_64 rng(21);
  const Data data = make_data(10, 2, rng);
  const Standardization st = standardize(data.y);
  const Eigen::VectorXd ys = (data.y.array() - st.shift) / st.scale;
  Eigen::VectorXd ls(2);
  ls << 0.35, 0.8;
  const KernelParams params{ls, 0.9, 1e-4};
  const LmlValue v = log_marginal_likelihood(data.x, ys, params, true);
  CHECK(v.value == doctest::Approx(oracle::lml(data.x, ys, ls, 0.9, 1e-4)).epsilon(1e-9));

  // Central differences on log parameters.
  REQUIRE(v.gradient.size() == 4);
  const double h = 1e-5;
  for (int k = 0; k < 4; ++k) {
    auto shifted = [&](double s) {
      KernelParams p = params;
      if (k < 2) p.lengthscales[k] *= std::exp(s);
      if (k == 2) p.signal_variance *= std::exp(s);
      if (k == 3) p.jitter *= std::exp(s);
      return log_marginal_likelihood(data.x, ys, p, false).value;
    };
    const double fd = (shifted(h) - shifted(-h)) / (2 * h);
    CHECK(v.gradient[k] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("fit improves on the default start and respects bounds") {
  std::mt19937_64 rng(8);
  const Data data = make_data(25, 3, rng);
  GpFitOptions opt;
  opt.seed = 4;
  const GpModel gp = GpModel::fit(data.x, data.y, opt);
  const auto& p = gp.params();
  for (int j = 0; j < 3; ++j) {
    CHECK(p.lengthscales[j] >= opt.bounds.lengthscale_min);
    CHECK(p.lengthscales[j] <= opt.bounds.lengthscale_max);
  }
  CHECK(p.jitter >= opt.bounds.jitter_min);
  CHECK(p.jitter <= opt.bounds.jitter_max);
  const Standardization st = standardize(data.y);
  const Eigen::VectorXd ys = (data.y.array() - st.shift) / st.scale;
  const double start = log_marginal_likelihood(
      data.x, ys, {Eigen::VectorXd::Constant(3, 0.5 * std::sqrt(3.0)), 1.0, 1e-6}, false).value;
  CHECK(gp.log_marginal_likelihood() >= start - 1e-9);

  const GpModel again = GpModel::fit(data.x, data.y, opt);
  CHECK(again.params().lengthscales == p.lengthscales);
}

TEST_CASE("constant outputs give a prior-only model") {
  PointBatch x(4, 2);
  x.setRandom();
  x = (x.array() + 1.0) / 2.0;
  const GpModel gp = GpModel::fit(x, Eigen::VectorXd::Constant(4, 2.5), {});
  CHECK(gp.prior_only());
  const Prediction p = gp.predict(Point::Constant(2, 0.3));
  CHECK(p.mean == doctest::Approx(2.5));
  CHECK(std::isfinite(p.variance));
}

TEST_CASE("duplicate inputs survive through jitter escalation") {
  PointBatch x(3, 1);
  x << 0.5, 0.5, 0.5;
  Eigen::VectorXd y(3);
  y << 1.0, 1.1, 0.9;
  const GpModel gp = GpModel::condition(x, y, {Eigen::VectorXd::Constant(1, 0.2), 1.0, 0.0});
  CHECK(gp.params().jitter > 0.0);
  CHECK(std::isfinite(gp.predict(Point::Constant(1, 0.5)).mean));
}

TEST_CASE("dimension mismatch is rejected") {
  PointBatch x(3, 2);
  x.setZero();
  x(1, 0) = 0.5;
  x(2, 1) = 0.5;
  const GpModel gp = GpModel::condition(x, Eigen::Vector3d(0, 1, 2), {Eigen::VectorXd::Constant(2, 0.3), 1, 1e-6});
  CHECK_THROWS_AS(gp.predict(Point::Zero(3)), InputError);
}

TEST_CASE("posterior samples are reproducible and centred") {
  std::mt19937_64 rng(2);
  const Data data = make_data(6, 1, rng);
  const GpModel gp = GpModel::condition(data.x, data.y, {Eigen::VectorXd::Constant(1, 0.3), 1, 1e-6});
  PointBatch q(3, 1);
  q << 0.1, 0.5, 0.9;
  CHECK(gp.sample_posterior(q, 7) == gp.sample_posterior(q, 7));
  Eigen::VectorXd mean, var;
  gp.predict_batch(q, mean, var);
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
  const int n = 4000;
  for (int s = 0; s < n; ++s) acc += gp.sample_posterior(q, 100 + s);
  acc /= n;
  for (int i = 0; i < 3; ++i) CHECK(std::abs(acc[i] - mean[i]) < 5.0 * std::sqrt(var[i] / n) + 1e-9);
}
