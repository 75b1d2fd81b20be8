#include "doctest.h"

#include <cmath>
#include <random>

#include "lifeplan/markowitz.hpp"
#include "oracles.hpp"

using namespace lifeplan;

namespace {

AssetStats diag_instance(double e1 = 0.10, double e2 = 0.05) {
  return make_stats(Eigen::Vector2d(e1, e2), Eigen::Vector2d(0.04, 0.09).asDiagonal().toDenseMatrix());
}

}  // namespace

TEST_CASE("frontier constants by hand") {
  SUBCASE("identity covariance") {
    const auto k = frontier_constants(make_stats(Eigen::Vector2d(0.10, 0.05), Eigen::Matrix2d::Identity()), 0.02);
    CHECK(k.A == doctest::Approx(0.15));
    CHECK(k.B == doctest::Approx(0.0125));
    CHECK(k.C == doctest::Approx(2.0));
    CHECK(k.D == doctest::Approx(0.0025));
    CHECK(k.H == doctest::Approx(0.0073));
  }
  SUBCASE("diagonal covariance") {
    const auto k = frontier_constants(diag_instance(), 0.02);
    CHECK(k.A == doctest::Approx(3.0556).epsilon(1e-4));
    CHECK(k.B == doctest::Approx(0.27778).epsilon(1e-4));
    CHECK(k.C == doctest::Approx(36.111).epsilon(1e-4));
    CHECK(k.H == doctest::Approx(0.17).epsilon(1e-12));
  }
  SUBCASE("returns equal to the riskless rate give H = 0") {
    const auto k = frontier_constants(make_stats(Eigen::Vector2d(0.03, 0.03), Eigen::Matrix2d::Identity()), 0.03);
    CHECK(std::abs(k.H) <= 1e-15);
    CHECK(std::abs(k.D) <= 1e-15);
  }
  SUBCASE("singular covariance is refused") {
    Eigen::Matrix2d s;
    s << 1.0, 1.0, 1.0, 1.0;
    const auto stats = make_stats(Eigen::Vector2d(0.1, 0.05), s);
    CHECK_THROWS_AS(frontier_constants(stats, 0.02), SingularMatrixError);
  }
  SUBCASE("near-singular covariance is refused") {
    Eigen::Matrix2d s;
    s << 1.0, 1.0 - 1e-14, 1.0 - 1e-14, 1.0;
    const auto stats = make_stats(Eigen::Vector2d(0.1, 0.05), s);
    CHECK_THROWS_AS(frontier_constants(stats, 0.02), SingularMatrixError);
  }
}

TEST_CASE("tangency portfolio") {
  SUBCASE("two assets, diagonal covariance") {
    const auto t = tangency_portfolio(diag_instance(), 0.02);
    CHECK(t.weights(0) == doctest::Approx(6.0 / 7.0).epsilon(1e-12));
    CHECK(t.weights(1) == doctest::Approx(1.0 / 7.0).epsilon(1e-12));
    CHECK(t.mean == doctest::Approx(0.092857).epsilon(1e-5));
    CHECK(t.sharpe == doctest::Approx(std::sqrt(0.17)).epsilon(1e-10));
  }
  SUBCASE("single asset") {
    const auto t = tangency_portfolio(make_stats(Eigen::VectorXd::Constant(1, 0.08), Eigen::MatrixXd::Constant(1, 1, 0.04)), 0.02);
    CHECK(t.weights(0) == doctest::Approx(1.0));
  }
  SUBCASE("exchangeable pair") {
    const auto t = tangency_portfolio(make_stats(Eigen::Vector2d(0.08, 0.08), 0.05 * Eigen::Matrix2d::Identity()), 0.02);
    CHECK(t.weights(0) == doctest::Approx(0.5));
    CHECK(t.weights(1) == doctest::Approx(0.5));
  }
  SUBCASE("riskless rate on the inefficient branch") {
    const auto stats = diag_instance();
    const auto k = frontier_constants(stats, 0.0);
    CHECK_THROWS_AS(tangency_portfolio(stats, k.A / k.C), DomainError);
    CHECK_THROWS_AS(tangency_portfolio(stats, 0.2), DomainError);
  }
  SUBCASE("formula without the riskless offset does not sum to one") {
    const auto w = tangency_weights_without_offset(diag_instance(), 0.02);
    CHECK(std::abs(w.sum() - 1.0) > 1e-3);
  }
}

TEST_CASE("unconstrained frontier") {
  const auto k = frontier_constants(make_stats(Eigen::Vector2d(0.10, 0.05), Eigen::Matrix2d::Identity()), 0.02);
  CHECK(unconstrained_frontier_variance(k, 0.075) == doctest::Approx(0.5));
  CHECK(unconstrained_frontier_variance(k, 0.10) == doctest::Approx(1.0));
  CHECK(unconstrained_frontier_variance(k, k.A / k.C + 0.013) ==
        doctest::Approx(unconstrained_frontier_variance(k, k.A / k.C - 0.013)));

  const auto flat = frontier_constants(make_stats(Eigen::Vector2d(0.05, 0.05), Eigen::Matrix2d::Identity()), 0.02);
  CHECK_THROWS_AS(unconstrained_frontier_variance(flat, 0.05), DomainError);
}

TEST_CASE("closed-form identities on random instances") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 1 + trial % 8;
    const auto stats = make_stats(oracle::random_vector(rng, n, 0.0, 0.2), oracle::random_spd(rng, n, 0.05));
    const auto k0 = frontier_constants(stats, 0.0);
    const double r_f = k0.A / k0.C - 0.01 - 0.05 * std::uniform_real_distribution<double>(0, 1)(rng);
    const auto k = frontier_constants(stats, r_f);
    const auto t = tangency_portfolio(stats, r_f);
    CAPTURE(trial);
    CHECK(std::abs(t.weights.sum() - 1.0) <= 1e-10);
    CHECK(std::abs(t.sharpe * t.sharpe - k.H) <= 1e-8 * k.H);
    CHECK(std::abs(t.mean - tangency_mean(k)) <= 1e-8);
    CHECK(std::abs(tangency_mean(k) - tangency_mean_rational(k)) <= 1e-10 * std::abs(tangency_mean_rational(k)));

    if (n > 1) {
      CHECK(unconstrained_frontier_variance(k, k.A / k.C) == doctest::Approx(1.0 / k.C).epsilon(1e-9));
      CHECK(unconstrained_frontier_variance(k, k.A / k.C + 0.01) > 1.0 / k.C);
    }

    // Rescaling the covariance keeps the weights and scales frontier variance.
    const double c = 0.5 + trial * 0.1;
    const auto scaled = make_stats(stats.mu, c * stats.sigma);
    const auto ts = tangency_portfolio(scaled, r_f);
    CHECK((ts.weights - t.weights).cwiseAbs().maxCoeff() <= 1e-9);
    if (n > 1) {
      const auto ks = frontier_constants(scaled, r_f);
      const double mu = k.A / k.C + 0.02;
      CHECK(unconstrained_frontier_variance(ks, mu) == doctest::Approx(c * unconstrained_frontier_variance(k, mu)).epsilon(1e-9));
    }
  }
}
