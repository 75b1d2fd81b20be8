#include "lifeplan/market_model.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lifeplan {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
  std::ostringstream msg;
  msg << source << ":" << line << ": " << what;
  throw DataError(msg.str());
}

}  // namespace

ReturnMatrix parse_returns(const std::string& text, int periods_per_year, const std::string& source) {
  if (periods_per_year < 1) throw DataError(source + ": periods_per_year must be a positive integer");

  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  ReturnMatrix out;
  out.periods_per_year = periods_per_year;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") line = trim(line.substr(3));
    if (line.empty()) continue;
    const auto fields = split(line);

    if (out.asset_ids.empty()) {
      std::set<std::string_view> seen;
      for (std::size_t col = 0; col < fields.size(); ++col) {
        if (fields[col].empty()) fail(source, line_no, "empty asset id in column " + std::to_string(col + 1));
        if (!seen.insert(fields[col]).second)
          fail(source, line_no, "duplicate asset id '" + std::string(fields[col]) + "'");
        out.asset_ids.emplace_back(fields[col]);
      }
      continue;
    }

    if (fields.size() != out.asset_ids.size()) {
      std::ostringstream what;
      what << "ragged row: expected " << out.asset_ids.size() << " fields, found " << fields.size();
      fail(source, line_no, what.str());
    }
    std::vector<double> values(fields.size());
    for (std::size_t col = 0; col < fields.size(); ++col) {
      const std::string_view f = fields[col];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        fail(source, line_no, "column " + std::to_string(col + 1) + ": not a finite number: '" + std::string(f) + "'");
      }
      values[col] = v;
    }
    rows.push_back(std::move(values));
  }

  if (out.asset_ids.empty()) throw DataError(source + ": missing header row");
  if (rows.size() < 2) {
    throw DataError(source + ": need at least 2 data rows, found " + std::to_string(rows.size()));
  }
  out.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.asset_ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      out.data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return out;
}

ReturnMatrix load_returns(const std::filesystem::path& path, int periods_per_year) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open returns file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_returns(buf.str(), periods_per_year, path.string());
}

AssetStats estimate_stats(const ReturnMatrix& returns) {
  const Eigen::Index T = returns.periods();
  if (T < 2) throw DataError("covariance needs at least 2 periods, got " + std::to_string(T));
  const double ppy = returns.periods_per_year;

  const Eigen::RowVectorXd mean = returns.data.colwise().mean();
  const Eigen::MatrixXd centered = returns.data.rowwise() - mean;
  Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(T - 1);
  // Store an exactly symmetric matrix.
  cov = (0.5 * (cov + cov.transpose())).eval();

  AssetStats stats;
  stats.asset_ids = returns.asset_ids;
  stats.mu = mean.transpose() * ppy;
  stats.sigma = cov * ppy;
  return stats;
}

AssetStats make_stats(Eigen::VectorXd mu, Eigen::MatrixXd sigma, std::vector<std::string> asset_ids) {
  const Eigen::Index n = mu.size();
  if (n < 1) throw DataError("at least one asset is required");
  if (sigma.rows() != n || sigma.cols() != n) throw DataError("covariance dimensions do not match the mean vector");
  if (!mu.allFinite() || !sigma.allFinite()) throw DataError("non-finite entries in asset statistics");
  const double scale = std::max(sigma.cwiseAbs().maxCoeff(), 1e-300);
  if ((sigma - sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw DataError("covariance is not symmetric");
  const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma, Eigen::EigenvaluesOnly).eigenvalues()(0);
  if (min_eig < -1e-10 * std::abs(sigma.trace())) throw DataError("covariance is not positive semidefinite");
  if (asset_ids.empty()) {
    for (Eigen::Index i = 0; i < n; ++i) asset_ids.push_back("A" + std::to_string(i + 1));
  }
  if (static_cast<Eigen::Index>(asset_ids.size()) != n) throw DataError("asset id count does not match the mean vector");
  AssetStats s;
  s.asset_ids = std::move(asset_ids);
  s.mu = std::move(mu);
  s.sigma = 0.5 * (sigma + sigma.transpose());
  return s;
}

}  // namespace lifeplan
