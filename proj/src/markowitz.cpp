#include "lifeplan/markowitz.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <sstream>

namespace lifeplan {

namespace {

Eigen::LLT<Eigen::MatrixXd> factor_covariance(const Eigen::MatrixXd& sigma) {
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("covariance matrix is not positive definite");
  const double rcond = llt.rcond();
  if (!(rcond > 1.0 / kMaxCovarianceCondition)) {
    std::ostringstream msg;
    msg << "covariance matrix is near-singular (condition estimate " << 1.0 / rcond << ")";
    throw SingularMatrixError(msg.str());
  }
  return llt;
}

}  // namespace

PortfolioWeights evaluate_portfolio(const AssetStats& stats, Eigen::VectorXd weights, double r_f) {
  PortfolioWeights p;
  p.weights = std::move(weights);
  p.r_f = r_f;
  p.mean = stats.mu.dot(p.weights);
  p.variance = std::max(0.0, p.weights.dot(stats.sigma * p.weights));
  p.sharpe = p.variance > 0.0 ? (p.mean - r_f) / std::sqrt(p.variance) : 0.0;
  return p;
}

FrontierConstants frontier_constants(const AssetStats& stats, double r_f) {
  const auto llt = factor_covariance(stats.sigma);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(stats.size());
  const Eigen::VectorXd inv_e = llt.solve(stats.mu);
  const Eigen::VectorXd inv_1 = llt.solve(ones);

  FrontierConstants k;
  k.r_f = r_f;
  k.A = ones.dot(inv_e);
  k.B = stats.mu.dot(inv_e);
  k.C = ones.dot(inv_1);
  k.D = k.B * k.C - k.A * k.A;
  k.H = k.B - 2.0 * k.A * r_f + k.C * r_f * r_f;
  return k;
}

double tangency_mean(const FrontierConstants& k) {
  const double a_over_c = k.A / k.C;
  return a_over_c - k.D / (k.C * k.C * (k.r_f - a_over_c));
}

double tangency_mean_rational(const FrontierConstants& k) { return (k.B - k.A * k.r_f) / (k.A - k.C * k.r_f); }

PortfolioWeights tangency_portfolio(const AssetStats& stats, double r_f) {
  const auto llt = factor_covariance(stats.sigma);
  const FrontierConstants k = frontier_constants(stats, r_f);
  if (!(r_f < k.A / k.C)) {
    std::ostringstream msg;
    msg << "tangency portfolio undefined: r_f = " << r_f << " is not below the minimum-variance mean A/C = "
        << k.A / k.C;
    throw DomainError(msg.str());
  }
  if (!(k.H > 0.0)) throw DomainError("tangency portfolio undefined: H = 0 (expected returns equal r_f)");

  const Eigen::VectorXd excess = stats.mu - Eigen::VectorXd::Constant(stats.size(), r_f);
  // Sigma^-1 (e - r_f 1) (E(r_M) - r_f) / H, and (E(r_M) - r_f) / H = 1 / (A - C r_f).
  const double scale = (tangency_mean(k) - r_f) / k.H;
  Eigen::VectorXd w = llt.solve(excess) * scale;
  return evaluate_portfolio(stats, std::move(w), r_f);
}

Eigen::VectorXd tangency_weights_without_offset(const AssetStats& stats, double r_f) {
  const auto llt = factor_covariance(stats.sigma);
  const FrontierConstants k = frontier_constants(stats, r_f);
  return llt.solve(stats.mu) * ((tangency_mean(k) - r_f) / k.H);
}

double unconstrained_frontier_variance(const FrontierConstants& k, double mu_target) {
  if (!(k.D > 1e-14)) {
    throw DomainError("unconstrained frontier is degenerate: D <= 1e-14 (expected returns collinear with 1)");
  }
  return (k.C * mu_target * mu_target - 2.0 * k.A * mu_target + k.B) / k.D;
}

}  // namespace lifeplan
