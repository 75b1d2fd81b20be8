#pragma once

// Long-only (w >= 0, 1'w = 1) portfolio selection on top of the QP solver.

#include <Eigen/Dense>

#include <vector>

#include "lifeplan/market_model.hpp"
#include "lifeplan/markowitz.hpp"

namespace lifeplan {

struct FrontierPoint {
  double mu_target = 0.0;
  double mean = 0.0;  // achieved, >= mu_target
  double variance = 0.0;
  Eigen::VectorXd weights;
};

struct ConstrainedFrontier {
  std::vector<FrontierPoint> points;  // mu_target ascending
  FrontierPoint gmv_point;
};

/// Weights below this are reported as exactly zero (then renormalized).
inline constexpr double kWeightDust = 1e-9;

/// Maximum-Sharpe long-only portfolio.
///
/// Solved through the homogenized program
///   minimize y' Sigma y  s.t.  (e - r_f 1)' y = 1,  y >= 0,
/// with w = y / 1'y. This is exact whenever some asset has e_i > r_f;
/// otherwise a DomainError is thrown. When the optimum is not unique the
/// minimum-norm point of the optimal face is reported, so exchangeable assets
/// receive equal weight.
PortfolioWeights max_sharpe_long_only(const AssetStats& stats, double r_f);

/// Long-only global minimum-variance portfolio.
FrontierPoint long_only_gmv(const AssetStats& stats);

/// minimize w' Sigma w  s.t.  e'w >= mu_target, 1'w = 1, w >= 0.
/// Targets below the GMV mean return the GMV point. Throws DomainError when
/// mu_target exceeds max_i e_i.
FrontierPoint min_variance_at_return(const AssetStats& stats, double mu_target);

/// n_points targets evenly spaced from the long-only GMV mean to max_i e_i.
ConstrainedFrontier trace_frontier(const AssetStats& stats, int n_points);

}  // namespace lifeplan
