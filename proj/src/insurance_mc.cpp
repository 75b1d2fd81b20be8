#include "lifeplan/insurance_mc.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "lifeplan/errors.hpp"

namespace lifeplan {

void HazardModel::validate() const {
  std::ostringstream why;
  if (!(h > 0.0) || !std::isfinite(h)) why << "hazard rate h must be positive; ";
  if (!(r >= 0.0) || !std::isfinite(r)) why << "discount rate r must be non-negative; ";
  if (!(L >= 0.0) || !std::isfinite(L)) why << "lump sum L must be non-negative; ";
  if (!(s >= 0.0) || !std::isfinite(s)) why << "spread s must be non-negative; ";
  if (horizon_M < 1) why << "horizon must be at least one year; ";
  if (!why.str().empty()) throw DomainError("invalid hazard model: " + why.str());
}

std::vector<double> standard_normal_draws(std::int64_t n, std::uint64_t seed) {
  if (n < 1) throw DomainError("number of Monte-Carlo draws must be positive");
  std::mt19937_64 rng(seed);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (auto& y : out) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    y = -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * u);
  }
  return out;
}

double strike_time_from_latent(double y, double h) {
  // 1 - Phi(y) through erfc keeps precision in the lower tail.
  const double tail = 0.5 * std::erfc(y / std::sqrt(2.0));
  return -std::log(tail) / h;
}

double survival_prob(const HazardModel& model, double t) {
  if (!(t >= 0.0)) throw DomainError("survival probability needs t >= 0");
  return std::exp(-model.h * t);
}

double analytic_discount_factor(const HazardModel& model) { return model.h / (model.h + model.r); }

McEstimate estimate_discount_factor(const HazardModel& model, std::int64_t n_draws, std::uint64_t seed) {
  model.validate();
  const auto ys = standard_normal_draws(n_draws, seed);
  // Welford accumulation.
  double mean = 0.0;
  double m2 = 0.0;
  std::int64_t k = 0;
  for (double y : ys) {
    const double v = std::exp(-model.r * strike_time_from_latent(y, model.h));
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  McEstimate est;
  est.value = mean;
  est.std_error = n_draws > 1 ? std::sqrt(m2 / static_cast<double>(n_draws - 1) / static_cast<double>(n_draws)) : 0.0;
  est.n_draws = n_draws;
  est.seed = seed;
  return est;
}

double mean_strike_time(const HazardModel& model, std::int64_t n_draws, std::uint64_t seed) {
  model.validate();
  double total = 0.0;
  for (double y : standard_normal_draws(n_draws, seed)) total += strike_time_from_latent(y, model.h);
  return total / static_cast<double>(n_draws);
}

int expected_strike_year(const HazardModel& model, std::int64_t n_draws, std::uint64_t seed) {
  return static_cast<int>(std::ceil(mean_strike_time(model, n_draws, seed)));
}

int analytic_strike_year(const HazardModel& model) {
  model.validate();
  return static_cast<int>(std::ceil(1.0 / model.h));
}

double spread_linear_coefficient(const HazardModel& model, double discount_factor) {
  model.validate();
  double survival_sum = 0.0;
  for (int i = 1; i <= model.horizon_M; ++i) survival_sum += std::exp(-model.h * i);
  return discount_factor * model.L - model.s * survival_sum;
}

double spread_linear_coefficient(const HazardModel& model) {
  return spread_linear_coefficient(model, analytic_discount_factor(model));
}

double spread_variance_coefficient(const HazardModel& model) {
  model.validate();
  double total = 0.0;
  for (int i = 1; i <= model.horizon_M; ++i) {
    const double survive = std::exp(-model.h * i);
    total += (1.0 - survive) * survive;
  }
  return model.s * model.s * total;
}

}  // namespace lifeplan
