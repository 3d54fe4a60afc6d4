#include "fundgrowth/scenario_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <set>
#include <sstream>
#include <vector>

#include "fundgrowth/errors.hpp"

namespace fundgrowth {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end || !std::isfinite(v)) {
    throw ConfigError("not a number: '" + t + "'");
  }
  return v;
}

std::uint64_t parse_unsigned(const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const char* end = t.data() + t.size();
  const auto [ptr, ec] = std::from_chars(t.data(), end, v);
  if (t.empty() || ec != std::errc() || ptr != end) {
    throw ConfigError("not a nonnegative integer: '" + t + "'");
  }
  return v;
}

CovMatrix parse_cov(const std::string& text) {
  try {
    return CovMatrix(parse_matrix(text));
  } catch (const NotPositiveSemidefinite&) {
    throw ConfigError("covariance is not positive semidefinite");
  }
}

CovMatrix cov_preset(const std::string& name, Eigen::Index dim) {
  if (name == "identity") return CovMatrix::identity(dim);
  if (name == "us_market") {
    // Annualised variance of an 18% volatility index.
    return CovMatrix::diagonal(Vector::Constant(dim, 0.18 * 0.18));
  }
  if (name == "equicorrelated") {
    Matrix m = Matrix::Constant(dim, dim, 0.5);
    m.diagonal().setOnes();
    return CovMatrix(m);
  }
  throw ConfigError("unknown cov_preset '" + name + "'");
}

template <class E>
E parse_enum(const std::string& v, const std::map<std::string, E>& names, const std::string& key) {
  const auto it = names.find(v);
  if (it == names.end()) throw ConfigError("invalid value '" + v + "' for " + key);
  return it->second;
}

}  // namespace

Matrix parse_matrix(const std::string& text) {
  const auto rows = split(text, ';');
  if (rows.empty()) throw ConfigError("empty matrix");
  std::vector<std::vector<double>> values;
  for (const auto& row : rows) {
    std::vector<double> r;
    for (const auto& cell : split(row, ',')) r.push_back(parse_double(cell));
    if (!values.empty() && r.size() != values.front().size()) throw ConfigError("ragged matrix rows");
    values.push_back(std::move(r));
  }
  Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.front().size()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = values[i][j];
  }
  return m;
}

Vector parse_vector(const std::string& text) {
  const auto cells = split(text, ',');
  Vector v(static_cast<Eigen::Index>(cells.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = parse_double(cells[i]);
  if (v.size() == 0) throw ConfigError("empty vector");
  return v;
}

PriorSpec ScenarioConfig::prior() const {
  PriorSpec spec{prior_mean.value_or(Vector::Zero(dimension)),
                 prior_cov.value_or(CovMatrix::identity(dimension)), prior_truncation};
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("prior: ") + e.what());
  }
  return spec;
}

RunConfig parse_run_config(std::istream& in) {
  std::map<std::string, std::pair<std::string, std::size_t>> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (kv.count(key)) throw ConfigError("line " + std::to_string(line_no) + ": repeated key " + key);
    kv[key] = {trim(t.substr(eq + 1)), line_no};
  }

  RunConfig cfg;
  ScenarioConfig& sc = cfg.scenario;
  BacktestConfig& bt = cfg.backtest;
  std::optional<std::string> cov_text, preset;
  std::optional<double> trunc_lo, trunc_hi;

  const std::map<std::string, std::function<void(const std::string&)>> handlers = {
      {"dimension", [&](const std::string& v) { sc.dimension = static_cast<Eigen::Index>(parse_unsigned(v)); }},
      {"cov", [&](const std::string& v) { cov_text = v; }},
      {"cov_preset", [&](const std::string& v) { preset = v; }},
      {"nu", [&](const std::string& v) { sc.nu = parse_vector(v); }},
      {"prior_mean", [&](const std::string& v) { sc.prior_mean = parse_vector(v); }},
      {"prior_cov", [&](const std::string& v) { sc.prior_cov = parse_cov(v); }},
      {"prior_truncation_lo", [&](const std::string& v) { trunc_lo = parse_double(v); }},
      {"prior_truncation_hi", [&](const std::string& v) { trunc_hi = parse_double(v); }},
      {"clock_start", [&](const std::string& v) { sc.clock_start = parse_double(v); }},
      {"clock_step", [&](const std::string& v) { sc.clock_step = parse_double(v); }},
      {"horizon", [&](const std::string& v) { sc.horizon = parse_unsigned(v); }},
      {"funds", [&](const std::string& v) { sc.funds = static_cast<Eigen::Index>(parse_unsigned(v)); }},
      {"f", [&](const std::string& v) { sc.f = parse_matrix(v); }},
      {"theta", [&](const std::string& v) { sc.theta = parse_vector(v); }},
      {"start_date", [&](const std::string& v) {
         const auto d = Date::parse(v);
         if (!d) throw ConfigError("start_date must be YYYY-MM-DD");
         sc.start_date = *d;
       }},
      {"risk_free", [&](const std::string& v) { sc.risk_free = parse_double(v); }},
      {"residual_drift_paths", [&](const std::string& v) { sc.residual_drift_paths = parse_unsigned(v); }},
      {"seed", [&](const std::string& v) { cfg.seed = parse_unsigned(v); }},
      {"burn_in_days", [&](const std::string& v) { bt.burn_in_days = parse_unsigned(v); }},
      {"clock", [&](const std::string& v) {
         bt.clock = parse_enum<ClockMode>(v, {{"trading", ClockMode::Trading}, {"calendar", ClockMode::Calendar}}, "clock");
       }},
      {"prior", [&](const std::string& v) {
         bt.prior = parse_enum<PriorMode>(
             v, {{"uninformative", PriorMode::Uninformative}, {"anchored", PriorMode::Anchored}}, "prior");
       }},
      {"truncation_l", [&](const std::string& v) { bt.truncation_l = parse_double(v); }},
      {"truncation_r", [&](const std::string& v) { bt.truncation_r = parse_double(v); }},
      {"drop_policy", [&](const std::string& v) {
         cfg.csv.drop_policy = parse_enum<DropPolicy>(v, {{"error", DropPolicy::Error}, {"skip", DropPolicy::Skip}}, "drop_policy");
       }},
      {"covariance", [&](const std::string& v) {
         bt.covariance = parse_enum<CovarianceMode>(
             v, {{"raw", CovarianceMode::Raw}, {"demeaned", CovarianceMode::Demeaned}}, "covariance");
       }},
      {"fixed_a", [&](const std::string& v) { bt.fixed_a = parse_double(v); }},
      {"fixed_nu_hat", [&](const std::string& v) { bt.fixed_nu_hat = parse_vector(v); }},
      {"market_fund", [&](const std::string& v) { bt.market_fund = static_cast<Eigen::Index>(parse_unsigned(v)); }},
  };

  for (const auto& [key, entry] : kv) {
    const auto it = handlers.find(key);
    const std::string where = "line " + std::to_string(entry.second) + ": ";
    if (it == handlers.end()) throw ConfigError(where + "unknown key '" + key + "'");
    try {
      it->second(entry.first);
    } catch (const ConfigError& e) {
      throw ConfigError(where + key + ": " + e.what());
    }
  }

  if (cov_text && preset) throw ConfigError("set either cov or cov_preset, not both");
  if (cov_text) {
    sc.cov = parse_cov(*cov_text);
    if (!kv.count("dimension")) sc.dimension = sc.cov.dim();
  } else {
    sc.cov = cov_preset(preset.value_or("identity"), sc.dimension);
  }
  if (sc.dimension < 1) throw ConfigError("dimension must be at least 1");
  if (sc.cov.dim() != sc.dimension) throw ConfigError("cov does not match dimension");
  if (sc.nu && sc.nu->size() != sc.dimension) throw ConfigError("nu does not match dimension");
  if (!(sc.clock_step > 0.0)) throw ConfigError("clock_step must be positive");
  if (sc.horizon < 1) throw ConfigError("horizon must be at least 1");
  if (trunc_lo || trunc_hi) {
    sc.prior_truncation = Interval{trunc_lo.value_or(-std::numeric_limits<double>::infinity()),
                                   trunc_hi.value_or(std::numeric_limits<double>::infinity())};
  }
  if (sc.funds > 0) {
    if (sc.f && (sc.f->rows() != sc.dimension || sc.f->cols() != sc.funds)) {
      throw ConfigError("f must be dimension x funds");
    }
    if (sc.theta && sc.theta->size() != sc.funds) throw ConfigError("theta must have funds entries");
    if (sc.nu) throw ConfigError("nu and a fund model are mutually exclusive");
  } else if (sc.f || sc.theta) {
    throw ConfigError("f and theta require funds > 0");
  }
  if (bt.prior == PriorMode::Anchored) {
    if (!sc.prior_mean || !sc.prior_cov) throw ConfigError("anchored prior needs prior_mean and prior_cov");
    bt.prior_mean = *sc.prior_mean;
    bt.prior_cov = *sc.prior_cov;
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  return parse_run_config(in);
}

SimulatedScenario simulate_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  const auto clock = uniform_clock(config.clock_start, config.clock_step, config.horizon);
  if (config.funds > 0) {
    Rng rng(derive_seed(seed, 1));
    const Matrix f = config.f.value_or(random_normal_matrix(config.dimension, config.funds, rng));
    const FundSpec spec = build_fund_model(config.cov, f);
    Vector theta;
    if (config.theta) {
      theta = *config.theta;
    } else {
      Rng prior_rng(derive_seed(seed, 0));
      theta = random_normal_vector(config.funds, prior_rng);
    }
    return {simulate_fund_path(spec, theta, clock, derive_seed(seed, 2)), spec, theta};
  }
  const Vector nu = config.nu ? *config.nu : draw_prior(config.prior(), derive_seed(seed, 0));
  return {simulate_path(nu, config.cov, clock, derive_seed(seed, 2)), std::nullopt, std::nullopt};
}

}  // namespace fundgrowth
