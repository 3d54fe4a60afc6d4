#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fundgrowth/bayes_filter.hpp"
#include "fundgrowth/dates.hpp"
#include "fundgrowth/return_series.hpp"

namespace fundgrowth {

enum class ClockMode { Trading, Calendar };
enum class PriorMode { Uninformative, Anchored };
/// Raw: C sums outer products of returns. Demeaned: outer products of deviations from the running mean.
enum class CovarianceMode { Raw, Demeaned };

struct BacktestConfig {
  /// Trading clock: rows before the first displayed one. Calendar clock: days after the first date.
  std::size_t burn_in_days = 7500;
  ClockMode clock = ClockMode::Trading;
  PriorMode prior = PriorMode::Uninformative;
  Vector prior_mean;   ///< nu_hat(0), anchored prior only
  CovMatrix prior_cov; ///< kappa(0), anchored prior only
  std::optional<double> truncation_l;  ///< one fund only; missing end is infinite
  std::optional<double> truncation_r;
  CovarianceMode covariance = CovarianceMode::Raw;
  std::optional<double> fixed_a;       ///< override the shrinkage factor
  std::optional<Vector> fixed_nu_hat;  ///< override the posterior mean
  Eigen::Index market_fund = 0;        ///< fund whose return drives the market track

  bool truncated() const { return truncation_l.has_value() || truncation_r.has_value(); }
  /// Throws ConfigError for inconsistent settings.
  void validate(Eigen::Index funds) const;
};

struct BacktestRow {
  Date date;
  double clock = 0.0;   ///< operational time O
  Vector excess;        ///< x(t)
  Vector R;
  Matrix C;
  Vector nu_hat;
  Matrix kappa;
  double psi = 0.0;
  double a = 0.0;
  Vector rho;           ///< a nu_hat
  double log_market = 0.0;
  double log_nu_hat = 0.0;
  double log_shrunk = 0.0;
  double F = 0.0;
};

struct BacktestSeries {
  std::vector<BacktestRow> rows;  ///< displayed (post burn-in) rows only
  std::size_t burn_in = 0;        ///< rows consumed before the first displayed one
  Eigen::Index funds = 0;
  /// Largest |log(1 + pi x) - (pi x - (pi x)^2 / 2)| over the nu_hat track: the gap between
  /// daily compounding and its continuous-time approximation.
  double max_discretisation_gap = 0.0;
};

/// Incremental engine; pushing a series in one pass or in chunks gives the same result.
class Backtester {
 public:
  Backtester(Eigen::Index funds, BacktestConfig config);

  /// Throws NonMonotoneDates, DimensionMismatch, InsufficientBurnIn.
  void push(const Date& date, const Vector& excess);
  void push(const ReturnSeries& series, std::size_t begin, std::size_t end);

  const BacktestSeries& series() const { return out_; }
  std::size_t steps_seen() const { return steps_; }

 private:
  bool display_reached(const Date& date) const;
  PosteriorState posterior() const;
  double psi_for(const PosteriorState& post) const;

  BacktestConfig config_;
  Eigen::Index funds_;
  std::size_t steps_ = 0;
  std::optional<Date> first_date_;
  std::optional<Date> last_date_;
  Vector R_;
  Matrix C_;
  Vector running_mean_;
  BacktestSeries out_;
};

/// Requires more rows than the burn-in and a positive definite C at the first displayed row.
BacktestSeries run_backtest(const ReturnSeries& series, const BacktestConfig& config);

struct WealthRow {
  Date date;
  double market = 0.0;
  double nu_hat = 0.0;
  double shrunk = 0.0;
  double F = 0.0;
};
std::vector<WealthRow> wealth_tracks(const BacktestSeries& bt);

/// date,nu_hat_1..K,a,F,logW_market,logW_nuhat,logW_shrunk,O,C_i_j (i <= j)
void write_backtest_csv(const BacktestSeries& bt, std::ostream& out);
void write_backtest_csv(const BacktestSeries& bt, const std::filesystem::path& path);

}  // namespace fundgrowth
