#include "fundgrowth/backtest.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "fundgrowth/errors.hpp"
#include "fundgrowth/shrinkage.hpp"

namespace fundgrowth {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_growth(double portfolio_return) {
  const double gross = 1.0 + portfolio_return;
  return gross > 0.0 ? std::log(gross) : -kInf;
}

}  // namespace

void BacktestConfig::validate(Eigen::Index funds) const {
  if (funds < 1) throw ConfigError("at least one fund is required");
  if (prior == PriorMode::Anchored) {
    if (prior_mean.size() != funds || prior_cov.dim() != funds) {
      throw ConfigError("anchored prior needs mean and covariance of size K");
    }
    if (!prior_cov.is_positive_definite()) throw ConfigError("prior covariance must be positive definite");
  }
  if (truncated()) {
    if (funds != 1) throw ConfigError("truncated prior is only available for one fund");
    if (!(truncation_l.value_or(-kInf) < truncation_r.value_or(kInf))) {
      throw ConfigError("truncation requires truncation_l < truncation_r");
    }
  }
  if (fixed_a && !(*fixed_a >= 0.0 && *fixed_a <= 1.0)) throw ConfigError("fixed_a must lie in [0,1]");
  if (fixed_nu_hat && fixed_nu_hat->size() != funds) throw ConfigError("fixed_nu_hat must have K entries");
  if (market_fund < 0 || market_fund >= funds) throw ConfigError("market_fund out of range");
}

Backtester::Backtester(Eigen::Index funds, BacktestConfig config)
    : config_(std::move(config)), funds_(funds) {
  config_.validate(funds);
  R_ = Vector::Zero(funds);
  C_ = Matrix::Zero(funds, funds);
  running_mean_ = Vector::Zero(funds);
  if (config_.prior == PriorMode::Anchored) {
    const PosteriorState anchor = anchored_prior(config_.prior_mean, config_.prior_cov);
    R_ = anchor.R;
    C_ = anchor.C.matrix();
  }
  out_.funds = funds;
}

bool Backtester::display_reached(const Date& date) const {
  if (config_.clock == ClockMode::Trading) return steps_ > config_.burn_in_days;
  return date.days_since_epoch() - first_date_->days_since_epoch() >=
         static_cast<long>(config_.burn_in_days);
}

PosteriorState Backtester::posterior() const {
  const CovMatrix C(C_);
  if (config_.truncated()) {
    return truncated_posterior_1d(R_(0), C(0, 0), config_.truncation_l.value_or(-kInf),
                                  config_.truncation_r.value_or(kInf));
  }
  return gaussian_posterior(R_, C);
}

double Backtester::psi_for(const PosteriorState& post) const {
  if (funds_ == 1) return psi_one_fund(post.nu_hat(0), post.kappa(0, 0));
  if (config_.fixed_nu_hat) return 27.0 / 8.0 * post.C.quadratic_form(post.nu_hat);
  return psi_constant_cov(post.R, post.C);
}

void Backtester::push(const Date& date, const Vector& excess) {
  if (excess.size() != funds_) throw DimensionMismatch("excess return has wrong size");
  if (last_date_ && !(*last_date_ < date)) {
    throw NonMonotoneDates("dates not strictly increasing at " + date.iso());
  }
  if (!first_date_) first_date_ = date;
  last_date_ = date;
  ++steps_;

  Matrix dC;
  if (config_.covariance == CovarianceMode::Raw) {
    dC = excess * excess.transpose();
  } else {
    const double n = static_cast<double>(steps_);
    const Vector delta = excess - running_mean_;
    running_mean_ += delta / n;
    dC = delta * delta.transpose() * ((n - 1.0) / n);
  }
  R_ += excess;
  C_ += dC;

  const bool started = !out_.rows.empty();
  if (!started && !display_reached(date)) return;

  PosteriorState post;
  try {
    post = posterior();
  } catch (const SingularC&) {
    if (!started) throw InsufficientBurnIn("C is not positive definite at the end of the burn-in");
    throw;
  } catch (const DegenerateInterval&) {
    if (!started) throw InsufficientBurnIn("truncated posterior is degenerate at the end of the burn-in");
    throw;
  }
  if (config_.fixed_nu_hat) post.nu_hat = *config_.fixed_nu_hat;

  BacktestRow row;
  row.date = date;
  row.clock = config_.clock == ClockMode::Trading
                  ? static_cast<double>(steps_)
                  : static_cast<double>(date.days_since_epoch() - first_date_->days_since_epoch());
  row.excess = excess;
  row.R = R_;
  row.C = C_;
  row.nu_hat = post.nu_hat;
  row.kappa = post.kappa.matrix();
  row.psi = psi_for(post);
  row.a = config_.fixed_a ? *config_.fixed_a : cardano_a(row.psi);
  row.rho = row.a * row.nu_hat;

  if (started) {
    const BacktestRow& prev = out_.rows.back();
    const double nu_ret = prev.nu_hat.dot(excess);
    const double shrunk_ret = prev.a * nu_ret;
    row.log_market = prev.log_market + log_growth(excess(config_.market_fund));
    row.log_nu_hat = prev.log_nu_hat + log_growth(nu_ret);
    row.log_shrunk = prev.log_shrunk + log_growth(shrunk_ret);
    row.F = prev.F + 0.5 * prev.nu_hat.dot(dC * prev.nu_hat);
    const double gap = std::abs(log_growth(nu_ret) - (nu_ret - 0.5 * nu_ret * nu_ret));
    if (std::isfinite(gap)) out_.max_discretisation_gap = std::max(out_.max_discretisation_gap, gap);
  } else {
    out_.burn_in = steps_ - 1;
  }
  out_.rows.push_back(std::move(row));
}

void Backtester::push(const ReturnSeries& series, std::size_t begin, std::size_t end) {
  const Matrix excess = series.excess_returns().middleRows(
      static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(end - begin));
  for (std::size_t t = begin; t < end; ++t) {
    push(series.dates[t], excess.row(static_cast<Eigen::Index>(t - begin)).transpose());
  }
}

BacktestSeries run_backtest(const ReturnSeries& series, const BacktestConfig& config) {
  if (series.size() == 0) throw EmptySeries("return series is empty");
  if (config.clock == ClockMode::Trading && series.size() <= config.burn_in_days) {
    throw InsufficientBurnIn("series has " + std::to_string(series.size()) +
                             " rows, burn-in needs more than " + std::to_string(config.burn_in_days));
  }
  Backtester engine(series.funds(), config);
  engine.push(series, 0, series.size());
  if (engine.series().rows.empty()) throw InsufficientBurnIn("series ends before the burn-in");
  return engine.series();
}

std::vector<WealthRow> wealth_tracks(const BacktestSeries& bt) {
  std::vector<WealthRow> out;
  out.reserve(bt.rows.size());
  for (const auto& r : bt.rows) out.push_back({r.date, r.log_market, r.log_nu_hat, r.log_shrunk, r.F});
  return out;
}

void write_backtest_csv(const BacktestSeries& bt, std::ostream& out) {
  const Eigen::Index K = bt.funds;
  out << "date";
  for (Eigen::Index k = 0; k < K; ++k) out << ",nu_hat_" << (k + 1);
  out << ",a,F,logW_market,logW_nuhat,logW_shrunk,O";
  for (Eigen::Index i = 0; i < K; ++i)
    for (Eigen::Index j = i; j < K; ++j) out << ",C_" << (i + 1) << '_' << (j + 1);
  out << '\n';
  for (const auto& r : bt.rows) {
    out << r.date.iso();
    for (Eigen::Index k = 0; k < K; ++k) out << ',' << format_double(r.nu_hat(k));
    out << ',' << format_double(r.a) << ',' << format_double(r.F) << ',' << format_double(r.log_market)
        << ',' << format_double(r.log_nu_hat) << ',' << format_double(r.log_shrunk) << ','
        << format_double(r.clock);
    for (Eigen::Index i = 0; i < K; ++i)
      for (Eigen::Index j = i; j < K; ++j) out << ',' << format_double(r.C(i, j));
    out << '\n';
  }
}

void write_backtest_csv(const BacktestSeries& bt, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_backtest_csv(bt, out);
}

}  // namespace fundgrowth
