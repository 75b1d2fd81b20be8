#include "lifeplan/report.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "lifeplan/insurance_mc.hpp"
#include "lifeplan/market_model.hpp"

namespace lifeplan {

namespace {

std::string num(double v, int precision = 17) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, v);
  return buf;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <class T>
bool parse_number(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return !s.empty() && ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_bool(std::string_view s, bool& out) {
  if (s == "true" || s == "yes" || s == "1") return out = true, true;
  if (s == "false" || s == "no" || s == "0") return out = false, true;
  return false;
}

double parse_double_field(std::string_view s, const std::string& where) {
  double v = 0.0;
  if (s == "nan") return std::nan("");
  if (!parse_number(s, v)) throw DataError(where + ": not a number: '" + std::string(s) + "'");
  return v;
}

template <class F>
auto in_module(const char* module, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(module, e.what());
  }
}

// Files written by one run; removed unless the run completes.
class OutputSet {
 public:
  explicit OutputSet(std::filesystem::path dir) : dir_(std::move(dir)) {}
  OutputSet(const OutputSet&) = delete;
  OutputSet& operator=(const OutputSet&) = delete;
  ~OutputSet() {
    if (committed_) return;
    std::error_code ec;
    for (const auto& p : written_) std::filesystem::remove(p, ec);
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw PipelineError("cli_report", "cannot create output directory " + dir_.string() + ": " + ec.message());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cli_report", "cannot write " + path.string());
    written_.push_back(path);
    out << content;
    out.close();
    if (!out) throw PipelineError("cli_report", "cannot write " + path.string());
  }

  std::vector<std::filesystem::path> commit() {
    committed_ = true;
    return written_;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::filesystem::path> written_;
  bool committed_ = false;
};

std::string render_fund_csv(const AssetStats& stats, const PortfolioWeights& fund) {
  std::ostringstream out;
  out << "asset_id,weight\n";
  for (Eigen::Index i = 0; i < fund.weights.size(); ++i)
    if (fund.weights(i) > 0.0) out << stats.asset_ids[static_cast<std::size_t>(i)] << "," << num(fund.weights(i)) << "\n";
  return out.str();
}

std::optional<FrontierConstants> try_constants(const AssetStats& stats, double r_f) {
  try {
    return frontier_constants(stats, r_f);
  } catch (const SingularMatrixError&) {
    return std::nullopt;
  }
}

double unconstrained_or_nan(const std::optional<FrontierConstants>& k, double mu) {
  if (!k) return std::nan("");
  try {
    return unconstrained_frontier_variance(*k, mu);
  } catch (const DomainError&) {
    return std::nan("");
  }
}

std::string render_frontier_csv(const ConstrainedFrontier& frontier, const std::optional<FrontierConstants>& k) {
  std::ostringstream out;
  out << "mu,variance_constrained,variance_unconstrained\n";
  for (const auto& p : frontier.points)
    out << num(p.mu_target) << "," << num(p.variance) << "," << num(unconstrained_or_nan(k, p.mu_target)) << "\n";
  return out.str();
}

std::string render_insurance(const HazardModel& model, const McEstimate& est) {
  const double analytic = analytic_discount_factor(model);
  std::ostringstream out;
  out << "# discount factor V = E[exp(-r T)] for an exponential strike time\n";
  out << "hazard_h: " << num(model.h) << "\n";
  out << "discount_r: " << num(model.r) << "\n";
  out << "estimate: " << num(est.value) << "\n";
  out << "std_error: " << num(est.std_error) << "\n";
  out << "analytic: " << num(analytic) << "\n";
  out << "within_3_std_error: " << (std::abs(est.value - analytic) <= 3.0 * est.std_error ? "yes" : "no") << "\n";
  out << "draws: " << est.n_draws << "\n";
  out << "seed: " << est.seed << "\n";
  out << "method: " << kNormalSamplingMethod << "\n";
  out << "survival_at_horizon: " << num(survival_prob(model, model.horizon_M)) << "\n";
  out << "lump_sum_L: " << num(model.L) << "\n";
  out << "spread_s: " << num(model.s) << "\n";
  out << "spread_linear_coefficient: " << num(spread_linear_coefficient(model, est.value)) << "\n";
  out << "spread_variance_coefficient: " << num(spread_variance_coefficient(model)) << "\n";
  return out.str();
}

using Setter = std::function<void(RunConfig&, std::string_view, const std::string&)>;

Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, std::string_view v, const std::string& where) {
    c.*field = parse_double_field(v, where);
  };
}
Setter real(double LifecycleConfig::*field) {
  return [field](RunConfig& c, std::string_view v, const std::string& where) {
    c.lifecycle.*field = parse_double_field(v, where);
  };
}
Setter hazard_real(double HazardModel::*field) {
  return [field](RunConfig& c, std::string_view v, const std::string& where) {
    c.lifecycle.hazard.*field = parse_double_field(v, where);
  };
}
template <class Obj, class T>
Setter integer(T Obj::*field) {
  return [field](RunConfig& c, std::string_view v, const std::string& where) {
    T x{};
    if (!parse_number(v, x)) throw DataError(where + ": not an integer: '" + std::string(v) + "'");
    if constexpr (std::is_same_v<Obj, RunConfig>) c.*field = x;
    else c.lifecycle.*field = x;
  };
}
template <class Obj>
Setter flag(bool Obj::*field) {
  return [field](RunConfig& c, std::string_view v, const std::string& where) {
    bool x = false;
    if (!parse_bool(v, x)) throw DataError(where + ": expected true or false: '" + std::string(v) + "'");
    if constexpr (std::is_same_v<Obj, RunConfig>) c.*field = x;
    else c.lifecycle.*field = x;
  };
}

const std::map<std::string, Setter, std::less<>>& config_keys() {
  static const std::map<std::string, Setter, std::less<>> keys = {
      {"returns_path", [](RunConfig& c, std::string_view v, const std::string&) { c.returns_path = std::string(v); }},
      {"output_dir", [](RunConfig& c, std::string_view v, const std::string&) { c.output_dir = std::string(v); }},
      {"periods_per_year", integer(&RunConfig::periods_per_year)},
      {"r_f", real(&RunConfig::r_f)},
      {"frontier_points", integer(&RunConfig::frontier_points)},
      {"mc_draws", integer(&RunConfig::mc_draws)},
      {"mc_seed", integer(&RunConfig::mc_seed)},
      {"paper_faithful_v", flag(&RunConfig::paper_faithful_v)},
      {"mc_kstart", flag(&RunConfig::mc_kstart)},
      {"emit_svg", flag(&RunConfig::emit_svg)},
      {"years_M", integer(&LifecycleConfig::years_M)},
      {"r", real(&LifecycleConfig::r)},
      {"r_borrow", real(&LifecycleConfig::r_borrow)},
      {"r_save", real(&LifecycleConfig::r_save)},
      {"income_high", real(&LifecycleConfig::income_high)},
      {"income_low", real(&LifecycleConfig::income_low)},
      {"d_floor", real(&LifecycleConfig::d_floor)},
      {"initial_saving", real(&LifecycleConfig::initial_saving)},
      {"risk_aversion_B", real(&LifecycleConfig::risk_aversion_B)},
      {"house_initial", real(&LifecycleConfig::house_initial)},
      {"house_annual", real(&LifecycleConfig::house_annual)},
      {"house_years", integer(&LifecycleConfig::house_years)},
      {"house_growth", real(&LifecycleConfig::house_growth)},
      {"house_utility", real(&LifecycleConfig::house_utility)},
      {"hazard_h", hazard_real(&HazardModel::h)},
      {"lump_sum_L", hazard_real(&HazardModel::L)},
      {"spread_s", hazard_real(&HazardModel::s)},
      {"enable_stock", flag(&LifecycleConfig::enable_stock)},
      {"enable_borrow", flag(&LifecycleConfig::enable_borrow)},
      {"enable_save", flag(&LifecycleConfig::enable_save)},
      {"enable_house", flag(&LifecycleConfig::enable_house)},
      {"enable_insurance", flag(&LifecycleConfig::enable_insurance)},
  };
  return keys;
}

// Linear map from data coordinates to the plot area.
struct Axis {
  double lo = 0.0, hi = 1.0;
  double px_lo = 0.0, px_hi = 1.0;
  double operator()(double v) const { return px_lo + (v - lo) / (hi - lo) * (px_hi - px_lo); }
};

Axis make_axis(double lo, double hi, double px_lo, double px_hi) {
  double pad = 0.05 * (hi - lo);
  if (!(pad > 0.0)) pad = std::max(1e-3, 0.05 * std::abs(hi));
  return Axis{lo - pad, hi + pad, px_lo, px_hi};
}

std::string polyline(const std::vector<std::pair<double, double>>& pts, const Axis& x, const Axis& y) {
  std::string s;
  for (const auto& [sd, mean] : pts) {
    if (!s.empty()) s += ' ';
    s += fixed(x(sd), 2) + "," + fixed(y(mean), 2);
  }
  return s;
}

}  // namespace

void RunConfig::validate() const {
  if (returns_path.empty()) throw DataError("returns_path must not be empty");
  if (output_dir.empty()) throw DataError("output_dir must not be empty");
  if (periods_per_year < 1) throw DataError("periods_per_year must be >= 1");
  if (frontier_points < 2) throw DataError("frontier_points must be >= 2");
  if (mc_draws < 1) throw DataError("mc_draws must be >= 1");
  if (!std::isfinite(r_f)) throw DataError("r_f must be finite");
  lifecycle.validate();
}

RunConfig parse_run_config(const std::string& text, const std::string& source, RunConfig base,
                           const std::filesystem::path& base_dir) {
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  std::set<std::string, std::less<>> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw DataError(where + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = config_keys().find(key);
    if (it == config_keys().end()) throw DataError(where + ": unknown key '" + std::string(key) + "'");
    if (!seen.emplace(key).second) throw DataError(where + ": duplicate key '" + std::string(key) + "'");
    if (value.empty()) throw DataError(where + ": missing value for '" + std::string(key) + "'");
    it->second(base, value, where);
    if (key == "returns_path" && base.returns_path.is_relative() && !base_dir.empty())
      base.returns_path = base_dir / base.returns_path;
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string(), std::move(base), path.parent_path());
}

std::vector<std::filesystem::path> run_pipeline(const RunConfig& config, Stage stage) {
  in_module("cli_report", [&] { config.validate(); });
  OutputSet out(config.output_dir);
  const bool all = stage == Stage::all;

  if (all || stage == Stage::insure) {
    const HazardModel model = config.lifecycle.hazard_model();
    const McEstimate est = in_module("insurance_mc", [&] {
      model.validate();
      return estimate_discount_factor(model, config.mc_draws, config.mc_seed);
    });
    out.write("insurance.txt", render_insurance(model, est));
  }
  if (stage == Stage::insure) return out.commit();

  const AssetStats stats =
      in_module("market_model", [&] { return estimate_stats(load_returns(config.returns_path, config.periods_per_year)); });

  std::optional<PortfolioWeights> fund;
  if (all || stage == Stage::fund || stage == Stage::plan) {
    fund = in_module("constrained_portfolio", [&] { return max_sharpe_long_only(stats, config.r_f); });
    if (stage != Stage::plan) out.write("fund_weights.csv", render_fund_csv(stats, *fund));
  }

  if (all || stage == Stage::frontier) {
    const ConstrainedFrontier frontier =
        in_module("constrained_portfolio", [&] { return trace_frontier(stats, config.frontier_points); });
    const auto constants = in_module("markowitz_closed_form", [&] { return try_constants(stats, config.r_f); });
    out.write("frontier.csv", render_frontier_csv(frontier, constants));
    if (config.emit_svg) out.write("frontier.svg", render_frontier_svg(frontier, constants));
  }

  if (all || stage == Stage::plan) {
    const RiskyAssetSummary asset{fund->mean, fund->variance};
    LifecycleConfig lc = config.lifecycle;
    lc.mc_discount_factor = config.paper_faithful_v;
    lc.mc_kstart = config.mc_kstart;
    lc.mc_draws = config.mc_draws;
    const LifecyclePlan plan = in_module("lifecycle_planner", [&] { return solve_lifecycle(lc, asset, config.mc_seed); });
    out.write("plan.csv", render_plan_csv(plan, asset));
  }
  return out.commit();
}

std::string render_frontier_svg(const ConstrainedFrontier& frontier, const std::optional<FrontierConstants>& constants) {
  if (frontier.points.empty()) throw DomainError("frontier has no points");
  constexpr int W = 800, H = 600, left = 80, right = 40, top = 40, bottom = 60;

  std::vector<std::pair<double, double>> con, unc;
  for (const auto& p : frontier.points) {
    con.emplace_back(std::sqrt(std::max(0.0, p.variance)), p.mu_target);
    const double v = unconstrained_or_nan(constants, p.mu_target);
    if (std::isfinite(v)) unc.emplace_back(std::sqrt(std::max(0.0, v)), p.mu_target);
  }
  double x_lo = con.front().first, x_hi = x_lo, y_lo = con.front().second, y_hi = y_lo;
  for (const auto* curve : {&con, &unc}) {
    for (const auto& [sd, mean] : *curve) {
      x_lo = std::min(x_lo, sd);
      x_hi = std::max(x_hi, sd);
      y_lo = std::min(y_lo, mean);
      y_hi = std::max(y_hi, mean);
    }
  }
  const Axis x = make_axis(x_lo, x_hi, left, W - right);
  const Axis y = make_axis(y_lo, y_hi, H - bottom, top);

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<!-- Efficient frontier. Viewport " << W << "x" << H << "; plot area margins left " << left << ", right "
    << right << ", top " << top << ", bottom " << bottom
    << ". x: standard deviation, y: mean, both annualized. -->\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << " " << H << "\">\n";
  s << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << H - bottom << "\" x2=\"" << W - right << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << H - bottom
    << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << left << "\" y=\"" << H - bottom + 20 << "\" font-size=\"12\">" << num(x.lo, 4) << "</text>\n";
  s << "<text x=\"" << W - right << "\" y=\"" << H - bottom + 20 << "\" font-size=\"12\" text-anchor=\"end\">"
    << num(x.hi, 4) << "</text>\n";
  s << "<text x=\"" << left - 8 << "\" y=\"" << H - bottom << "\" font-size=\"12\" text-anchor=\"end\">" << num(y.lo, 4)
    << "</text>\n";
  s << "<text x=\"" << left - 8 << "\" y=\"" << top + 12 << "\" font-size=\"12\" text-anchor=\"end\">" << num(y.hi, 4)
    << "</text>\n";
  s << "<text x=\"" << (left + W - right) / 2 << "\" y=\"" << H - 15
    << "\" font-size=\"14\" text-anchor=\"middle\">standard deviation</text>\n";
  s << "<text x=\"20\" y=\"" << (top + H - bottom) / 2 << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
    << (top + H - bottom) / 2 << ")\">mean</text>\n";
  if (!unc.empty()) {
    s << "<polyline id=\"unconstrained\" fill=\"none\" stroke=\"#888888\" stroke-width=\"2\" stroke-dasharray=\"6 4\" points=\""
      << polyline(unc, x, y) << "\"/>\n";
  }
  s << "<polyline id=\"constrained\" fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"2\" points=\"" << polyline(con, x, y)
    << "\"/>\n";
  s << "<text x=\"" << W - right - 10 << "\" y=\"" << top + 20
    << "\" font-size=\"13\" text-anchor=\"end\" fill=\"#1f4e9c\">long-only frontier</text>\n";
  if (!unc.empty()) {
    s << "<text x=\"" << W - right - 10 << "\" y=\"" << top + 40
      << "\" font-size=\"13\" text-anchor=\"end\" fill=\"#888888\">unconstrained frontier</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string render_plan_csv(const LifecyclePlan& plan, const RiskyAssetSummary& asset) {
  const int M = plan.layout.M;
  std::ostringstream out;
  out << "# units: thousands of currency\n";
  out << "# house_year: " << (plan.house_year ? std::to_string(*plan.house_year) : std::string("none")) << "\n";
  out << "# insurance_units: " << num(plan.insurance_units()) << "\n";
  out << "# kstart: " << plan.kstart << "\n";
  out << "# objective: " << num(plan.objective) << "\n";
  out << "# discount_factor: " << num(plan.discount_factor) << "\n";
  out << "# r_stock: " << num(asset.r_stock) << "\n";
  out << "# var_stock: " << num(asset.var_stock) << "\n";
  out << "# feasibility_report: " << num(plan.feasibility_report) << "\n";
  out << "year,stock,borrow,save,house,consumption\n";
  for (int k = 1; k <= M; ++k) {
    out << k << "," << num(plan.stock(k)) << "," << num(plan.borrow(k)) << "," << num(plan.save(k)) << ","
        << num(plan.decision(plan.layout.house(k))) << "," << num(plan.consumption(k - 1)) << "\n";
  }
  return out.str();
}

PlanTable parse_plan_csv(const std::string& text) {
  std::istringstream in(text);
  std::string raw;
  std::map<std::string, std::string, std::less<>> meta;
  std::vector<std::array<double, 6>> rows;
  bool header = false;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = "plan.csv:" + std::to_string(line_no);
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (colon != std::string_view::npos)
        meta[std::string(trim(line.substr(1, colon - 1)))] = std::string(trim(line.substr(colon + 1)));
      continue;
    }
    if (!header) {
      if (line != "year,stock,borrow,save,house,consumption") throw DataError(where + ": unexpected header");
      header = true;
      continue;
    }
    std::array<double, 6> row{};
    std::size_t field = 0, start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      if (field >= row.size()) throw DataError(where + ": too many fields");
      row[field++] = parse_double_field(trim(line.substr(start, comma == line.npos ? line.npos : comma - start)), where);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (field != row.size()) throw DataError(where + ": expected 6 fields");
    if (row[0] != static_cast<double>(rows.size() + 1)) throw DataError(where + ": years must run 1, 2, ...");
    rows.push_back(row);
  }
  if (!header || rows.empty()) throw DataError("plan.csv: no plan rows");
  auto need = [&](const char* key) -> const std::string& {
    const auto it = meta.find(key);
    if (it == meta.end()) throw DataError(std::string("plan.csv: missing metadata '") + key + "'");
    return it->second;
  };

  const int M = static_cast<int>(rows.size());
  const DecisionLayout L{M};
  PlanTable t;
  t.decision = Eigen::VectorXd::Zero(L.size());
  t.consumption.resize(M);
  for (int k = 1; k <= M; ++k) {
    const auto& r = rows[static_cast<std::size_t>(k - 1)];
    t.decision(L.stock(k)) = r[1];
    t.decision(L.borrow(k)) = r[2];
    t.decision(L.save(k)) = r[3];
    t.decision(L.house(k)) = r[4];
    t.consumption(k - 1) = r[5];
  }
  t.decision(L.insurance()) = parse_double_field(need("insurance_units"), "plan.csv: insurance_units");
  if (!parse_number(std::string_view(need("kstart")), t.kstart)) throw DataError("plan.csv: bad kstart");
  if (need("house_year") != "none") {
    int y = 0;
    if (!parse_number(std::string_view(need("house_year")), y)) throw DataError("plan.csv: bad house_year");
    t.house_year = y;
  }
  t.objective = parse_double_field(need("objective"), "plan.csv: objective");
  t.asset.r_stock = parse_double_field(need("r_stock"), "plan.csv: r_stock");
  t.asset.var_stock = parse_double_field(need("var_stock"), "plan.csv: var_stock");
  return t;
}

}  // namespace lifeplan
