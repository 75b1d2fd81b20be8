#pragma once

// Closed-form mean-variance quantities when short sales are allowed.
//
// With e the expected returns, Sigma the covariance and 1 the ones vector:
//   A = 1' Sigma^-1 e,  B = e' Sigma^-1 e,  C = 1' Sigma^-1 1,
//   D = B C - A^2,      H = B - 2 A r_f + C r_f^2.
// The risky-only frontier is var(mu) = (C mu^2 - 2 A mu + B) / D and the
// maximal Sharpe ratio against r_f is sqrt(H).

#include <Eigen/Dense>

#include "lifeplan/market_model.hpp"

namespace lifeplan {

struct FrontierConstants {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double D = 0.0;
  double H = 0.0;
  double r_f = 0.0;

  /// Mean of the global minimum-variance portfolio.
  double gmv_mean() const { return A / C; }
};

struct PortfolioWeights {
  Eigen::VectorXd weights;
  double mean = 0.0;
  double variance = 0.0;
  double sharpe = 0.0;
  double r_f = 0.0;
};

/// Condition-number ceiling beyond which Sigma is treated as singular.
inline constexpr double kMaxCovarianceCondition = 1e12;

/// Fills mean, variance and Sharpe of `weights` against r_f.
PortfolioWeights evaluate_portfolio(const AssetStats& stats, Eigen::VectorXd weights, double r_f);

FrontierConstants frontier_constants(const AssetStats& stats, double r_f);

/// E(r_M) as printed in closed form: A/C - D / (C^2 (r_f - A/C)).
double tangency_mean(const FrontierConstants& k);

/// Same quantity through the rational form (B - A r_f) / (A - C r_f).
double tangency_mean_rational(const FrontierConstants& k);

/// Unconstrained maximum-Sharpe portfolio w = Sigma^-1 (e - r_f 1) / (A - C r_f).
/// Throws DomainError when r_f >= A/C (no tangency on the efficient branch).
PortfolioWeights tangency_portfolio(const AssetStats& stats, double r_f);

/// Weights from the formula with the riskless offset omitted,
/// Sigma^-1 e (E(r_M) - r_f) / H. Kept for comparison; they do not sum to one in general.
Eigen::VectorXd tangency_weights_without_offset(const AssetStats& stats, double r_f);

/// Risky-only frontier variance at mean mu_target.
double unconstrained_frontier_variance(const FrontierConstants& k, double mu_target);

}  // namespace lifeplan
