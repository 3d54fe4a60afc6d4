#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "fundgrowth/backtest.hpp"
#include "fundgrowth/dates.hpp"
#include "fundgrowth/market_sim.hpp"
#include "fundgrowth/return_series.hpp"

namespace fundgrowth {

/// Seed used when neither the command line nor the config sets one.
inline constexpr std::uint64_t kDefaultSeed = 20200722;

/// Simulation scenario. Either `nu` is given or it is drawn from the prior; with `funds > 0`
/// the path is generated through a fund model with nu = f theta.
struct ScenarioConfig {
  Eigen::Index dimension = 1;
  CovMatrix cov = CovMatrix::identity(1);
  std::optional<Vector> nu;
  std::optional<Vector> prior_mean;
  std::optional<CovMatrix> prior_cov;
  std::optional<Interval> prior_truncation;
  double clock_start = 0.0;
  double clock_step = 1.0 / 252.0;
  std::size_t horizon = 252;
  Eigen::Index funds = 0;
  std::optional<Matrix> f;
  std::optional<Vector> theta;
  Date start_date{2000, 1, 3};
  double risk_free = 0.0;
  std::size_t residual_drift_paths = 10000;

  PriorSpec prior() const;
};

struct RunConfig {
  ScenarioConfig scenario;
  BacktestConfig backtest;
  CsvOptions csv;
  std::optional<std::uint64_t> seed;
};

/// `key = value` lines; blank lines and lines starting with '#' are ignored. Vectors are
/// comma separated, matrix rows are separated by ';'. Unknown or repeated keys and malformed
/// values raise ConfigError naming the line.
RunConfig parse_run_config(std::istream& in);
RunConfig load_run_config(const std::filesystem::path& path);

/// Parsed `a,b;c,d`. Throws ConfigError.
Matrix parse_matrix(const std::string& text);
Vector parse_vector(const std::string& text);

struct SimulatedScenario {
  MarketPath path;
  std::optional<FundSpec> fund_model;
  std::optional<Vector> theta;
};

/// Draws every random ingredient (nu or theta, loadings, path) from `seed` by counter offsets:
/// 0 for the prior draw, 1 for the loadings, 2 for the path, 3 for the residual-drift check.
SimulatedScenario simulate_scenario(const ScenarioConfig& config, std::uint64_t seed);

}  // namespace fundgrowth
