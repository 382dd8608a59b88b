#include <doctest.h>

#include <array>
#include <random>

#include "oracles.hpp"
#include "trmei/penalized_surrogate.hpp"

using namespace trmei;

TEST_CASE("violation probability") {
  CHECK(violation_probability(0.0, 1.0) == doctest::Approx(0.5));
  CHECK(violation_probability(-1.6448536, 1.0) == doctest::Approx(0.0500000027796575).epsilon(1e-10));
  CHECK(violation_probability(2.0, 0.0) == 1.0);
  CHECK(violation_probability(-2.0, 0.0) == 0.0);
  CHECK(violation_probability(0.0, 0.0) == 0.0);
  CHECK(violation_probability(-37.0, 1.0) > 0.0);
  CHECK(violation_probability(-37.0, 1.0) < 1e-290);
  for (double z = -8; z <= 8; z += 0.5) {
    CHECK(violation_probability(z, 1.0) == doctest::Approx(oracle::normal_cdf(z)).epsilon(1e-12));
  }
}

TEST_CASE("combined moments") {
  const std::array<double, 2> p{0.25, 0.5};
  const PenalizedPosterior r = combine_moments(1.0, 0.5, p, {10.0});
  CHECK(r.mu_F == doctest::Approx(1.0 + 10.0 * 0.75));
  CHECK(r.sigma2_F == doctest::Approx(0.5 + 100.0 * (0.25 * 0.75 + 0.25)));

  const std::array<double, 2> zero{0.0, 0.0};
  const PenalizedPosterior f = combine_moments(1.0, 0.5, zero, {10.0});
  CHECK(f.mu_F == 1.0);
  CHECK(f.sigma2_F == 0.5);

  const std::array<double, 1> sure{1.0};
  const PenalizedPosterior v = combine_moments(1.0, 0.5, sure, {7.0});
  CHECK(v.mu_F == doctest::Approx(8.0));
  CHECK(v.sigma2_F == doctest::Approx(0.5));
}

TEST_CASE("moments agree with Monte Carlo on independent components") {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> z;
  const double mu_f = 0.3, s_f = 0.8, big_m = 4.0;
  const std::array<double, 2> mu_g{-0.4, 0.9}, s_g{1.1, 0.7};
  std::array<double, 2> p{};
  for (int j = 0; j < 2; ++j) p[j] = violation_probability(mu_g[j], s_g[j]);
  const PenalizedPosterior r = combine_moments(mu_f, s_f * s_f, p, {big_m});
  std::vector<double> draws(200000);
  for (double& d : draws) {
    d = mu_f + s_f * z(rng);
    for (int j = 0; j < 2; ++j) d += big_m * ((mu_g[j] + s_g[j] * z(rng)) > 0.0);
  }
  const auto mc = oracle::summarize(draws);
  CHECK(std::abs(mc.mean - r.mu_F) < 4 * mc.se_mean);
  CHECK(std::abs(mc.variance - r.sigma2_F) < 4 * mc.se_variance);
}

TEST_CASE("penalized value and counts") {
  const std::array<double, 2> g1{0.0, -1.0}, g2{0.1, -1.0}, g3{0.1, 2.0};
  CHECK(violation_count(g1) == 0);
  CHECK(violation_count(g2) == 1);
  CHECK(violation_count(g3) == 2);
  CHECK(penalized_value(3.0, g1, {10}) == 3.0);
  CHECK(penalized_value(3.0, g2, {10}) == 13.0);
  CHECK(penalized_value(3.0, g3, {10}) == 23.0);
}

TEST_CASE("model-based moments use standardized objective units") {
  PointBatch x(3, 1);
  x << 0.0, 0.5, 1.0;
  Eigen::VectorXd yf(3), yg(3);
  yf << 10.0, 20.0, 30.0;
  yg << -1.0, 0.5, 2.0;
  const KernelParams kp{Eigen::VectorXd::Constant(1, 0.4), 1.0, 1e-8};
  const GpModel obj = GpModel::condition(x, yf, kp);
  const std::vector<GpModel> cons{GpModel::condition(x, yg, kp)};
  Point q(1);
  q << 0.25;
  const PenalizedPosterior r = penalized_moments(obj, cons, q, {10.0});
  const Prediction pf = obj.predict(q), pg = cons[0].predict(q);
  CHECK(r.mu_f == doctest::Approx((pf.mean - obj.y_shift()) / obj.y_scale()));
  CHECK(r.sigma2_f == doctest::Approx(pf.variance / (obj.y_scale() * obj.y_scale())));
  CHECK(r.p_violation[0] == doctest::Approx(violation_probability(pg.mean, std::sqrt(pg.variance))));

  PointBatch qs(2, 1);
  qs << 0.25, 0.8;
  Eigen::VectorXd mu, s2;
  penalized_moments_batch(obj, cons, qs, {10.0}, mu, s2);
  CHECK(mu[0] == doctest::Approx(r.mu_F));
  CHECK(s2[0] == doctest::Approx(r.sigma2_F));
}
