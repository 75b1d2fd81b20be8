#pragma once

// Insurance valuation under an exponential strike-time model.
//
// A latent Y ~ N(0,1) maps to the strike time through the hazard CDF
// F(t) = 1 - exp(-h t):  T = -log(1 - Phi(Y)) / h.
// Money is in units of 1,000.

#include <cstdint>
#include <string>
#include <vector>

namespace lifeplan {

struct HazardModel {
  double h = 0.06;      // hazard rate per year
  double r = 0.03;      // utility discount rate per year
  double L = 30.0;      // lump sum paid at the strike
  double s = 0.5;       // annual spread payment
  int horizon_M = 30;   // years

  /// Throws DomainError when an invariant is violated.
  void validate() const;
};

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t n_draws = 0;
  std::uint64_t seed = 0;
};

/// How the standard normal draws are produced; written into report metadata.
inline constexpr const char* kNormalSamplingMethod =
    "inverse CDF (boost::math::erfc_inv) of 53-bit uniforms from std::mt19937_64";

/// n standard normal draws, deterministic in (n, seed).
std::vector<double> standard_normal_draws(std::int64_t n, std::uint64_t seed);

double strike_time_from_latent(double y, double h);

/// Probability that no strike has occurred by time t: exp(-h t).
double survival_prob(const HazardModel& model, double t);

/// E[exp(-r T)] = h / (h + r).
double analytic_discount_factor(const HazardModel& model);

/// Monte-Carlo estimate of E[exp(-r T)] with its standard error.
McEstimate estimate_discount_factor(const HazardModel& model, std::int64_t n_draws, std::uint64_t seed);

/// Sample mean of the simulated strike times.
double mean_strike_time(const HazardModel& model, std::int64_t n_draws, std::uint64_t seed);

/// ceil(sample mean strike time), the simulated income-drop year.
int expected_strike_year(const HazardModel& model, std::int64_t n_draws, std::uint64_t seed);

/// ceil(1/h), the large-sample limit of expected_strike_year.
int analytic_strike_year(const HazardModel& model);

/// Per-unit linear utility of the insurance: V L - s * sum_{i=1..M} (1 - F(i)).
/// V defaults to the analytic discount factor.
double spread_linear_coefficient(const HazardModel& model, double discount_factor);
double spread_linear_coefficient(const HazardModel& model);

/// Per-unit-squared variance of the spread stream: s^2 * sum_{i=1..M} F(i)(1 - F(i)).
double spread_variance_coefficient(const HazardModel& model);

}  // namespace lifeplan
