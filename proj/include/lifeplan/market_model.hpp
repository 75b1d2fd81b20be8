#pragma once

// Return-matrix ingestion and annualized sample statistics.

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

#include "lifeplan/errors.hpp"

namespace lifeplan {

/// T x N matrix of simple per-period returns, one column per asset.
struct ReturnMatrix {
  std::vector<std::string> asset_ids;
  Eigen::MatrixXd data;
  int periods_per_year = 12;

  Eigen::Index periods() const { return data.rows(); }
  Eigen::Index assets() const { return data.cols(); }
};

/// Annualized mean vector and covariance matrix.
struct AssetStats {
  std::vector<std::string> asset_ids;
  Eigen::VectorXd mu;
  Eigen::MatrixXd sigma;

  Eigen::Index size() const { return mu.size(); }
};

/// Parses a comma-separated file whose first row holds the asset ids.
/// Blank lines are skipped; everything else must be a row of N finite numbers.
ReturnMatrix load_returns(const std::filesystem::path& path, int periods_per_year);

/// Same format as load_returns, from an in-memory string. `source` names the
/// input in error messages.
ReturnMatrix parse_returns(const std::string& text, int periods_per_year,
                           const std::string& source = "<memory>");

/// Sample mean and unbiased (T-1) covariance, both multiplied by periods_per_year.
AssetStats estimate_stats(const ReturnMatrix& returns);

/// Builds an AssetStats directly, checking dimensions, symmetry and PSD-ness.
AssetStats make_stats(Eigen::VectorXd mu, Eigen::MatrixXd sigma,
                      std::vector<std::string> asset_ids = {});

}  // namespace lifeplan
