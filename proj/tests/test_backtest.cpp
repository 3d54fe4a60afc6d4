#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "fundgrowth/backtest.hpp"
#include "fundgrowth/errors.hpp"
#include "fundgrowth/market_sim.hpp"
#include "fundgrowth/return_series.hpp"

using namespace fundgrowth;

namespace {

ReturnSeries one_fund_series(std::size_t n, std::uint64_t seed, double nu = 2.22) {
  const MarketPath p = simulate_path(Vector::Constant(1, nu), CovMatrix::scalar(0.0324),
                                     uniform_clock(0.0, 1.0 / 252, n), seed);
  return series_from_path(p, Date{1990, 1, 1}, 0.0001);
}

BacktestConfig short_burn_in(std::size_t days = 200) {
  BacktestConfig cfg;
  cfg.burn_in_days = days;
  return cfg;
}

double variance(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

}  // namespace

TEST(Dates, ParseFormatAndWeekday) {
  const auto d = Date::parse("2020-07-22");
  ASSERT_TRUE(d.has_value());
  EXPECT_EQ(d->iso(), "2020-07-22");
  EXPECT_EQ(d->weekday(), 2);
  EXPECT_EQ(Date::from_days_since_epoch(d->days_since_epoch()), *d);
  EXPECT_EQ(Date::parse("1970-01-01")->days_since_epoch(), 0);
  EXPECT_EQ(Date::parse("2000-03-01")->days_since_epoch() - Date::parse("2000-02-28")->days_since_epoch(), 2);
  EXPECT_FALSE(Date::parse("2021-02-29").has_value());
  EXPECT_FALSE(Date::parse("2021-1-05").has_value());
  EXPECT_EQ(Date::parse("2020-07-24")->next_weekday().iso(), "2020-07-27");
}

TEST(Ingest, WellFormedFile) {
  std::istringstream in("date,ret_1,rf\n2020-01-02,0.01,0.0001\n2020-01-03,-0.02,0.0001\n2020-01-06,0.005,0.0001\n");
  const ReturnSeries s = parse_return_csv(in);
  EXPECT_EQ(s.size(), 3u);
  EXPECT_EQ(s.funds(), 1);
  EXPECT_NEAR(s.excess_returns()(1, 0), -0.0201, 1e-15);
}

TEST(Ingest, MalformedRowPolicy) {
  const std::string text = "date,ret_1,rf\n2020-01-02,0.01,0\n2020-01-03,abc,0\n2020-01-06,0.005,0\n";
  std::istringstream strict(text);
  try {
    parse_return_csv(strict);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream lenient(text);
  const ReturnSeries s = parse_return_csv(lenient, {DropPolicy::Skip});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.warnings.size(), 1u);
}

TEST(Ingest, MissingValuesAndOrdering) {
  std::istringstream in("date,ret_1,ret_2,rf\n2020-01-06,0.01,0.02,0.001\n2020-01-03,NA,0.01,0.001\n2020-01-02,0.03,0.01,0.002\n");
  // Descending input is reversed; the NA row is dropped.
  const ReturnSeries s = parse_return_csv(in);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.dropped_rows, 1u);
  EXPECT_EQ(s.dates.front().iso(), "2020-01-02");

  std::istringstream gap("date,ret_1,rf\n2020-01-02,0.01,0.002\n2020-01-03,0.01,\n2020-01-06,0.01,NA\n");
  const ReturnSeries f = parse_return_csv(gap);
  EXPECT_EQ(f.risk_free[1], 0.002);
  EXPECT_EQ(f.risk_free[2], 0.002);

  std::istringstream shuffled("date,ret_1,rf\n2020-01-02,0.01,0\n2020-01-06,0.01,0\n2020-01-03,0.01,0\n");
  EXPECT_THROW(parse_return_csv(shuffled), NonMonotoneDates);
  std::istringstream empty("date,ret_1,rf\n");
  EXPECT_THROW(parse_return_csv(empty), EmptySeries);
  std::istringstream header("day,ret_1,rf\n2020-01-02,0.01,0\n");
  EXPECT_THROW(parse_return_csv(header), ParseError);
}

TEST(Ingest, RoundTripOfSimulatedPath) {
  Rng rng(51);
  const MarketPath p = simulate_path(random_normal_vector(3, rng), random_spd(3, rng), uniform_clock(0, 1.0 / 252, 500), 9);
  const ReturnSeries s = series_from_path(p, Date{2001, 1, 1}, 0.00013);
  std::stringstream buf;
  write_return_csv(s, buf);
  const ReturnSeries back = parse_return_csv(buf);
  ASSERT_EQ(back.size(), 500u);
  EXPECT_LT((back.excess_returns() - p.increments).cwiseAbs().maxCoeff(), 1e-12);
  for (std::size_t t = 1; t < back.size(); ++t) EXPECT_LT(back.dates[t - 1], back.dates[t]);
}

TEST(Backtest, BurnInAndStandardisation) {
  const ReturnSeries s = one_fund_series(1000, 1);
  const BacktestSeries bt = run_backtest(s, short_burn_in(200));
  EXPECT_EQ(bt.burn_in, 200u);
  ASSERT_EQ(bt.rows.size(), 800u);
  EXPECT_EQ(bt.rows.front().date, s.dates[200]);
  const BacktestRow& first = bt.rows.front();
  EXPECT_EQ(first.log_market, 0.0);
  EXPECT_EQ(first.log_nu_hat, 0.0);
  EXPECT_EQ(first.log_shrunk, 0.0);
  EXPECT_EQ(first.F, 0.0);
  for (std::size_t t = 1; t < bt.rows.size(); ++t) {
    EXPECT_GE(bt.rows[t].a, 0.0);
    EXPECT_LE(bt.rows[t].a, 1.0);
    EXPECT_GE(bt.rows[t].C(0, 0), bt.rows[t - 1].C(0, 0));
    EXPECT_NEAR(bt.rows[t].nu_hat(0), bt.rows[t].R(0) / bt.rows[t].C(0, 0), 1e-10 * std::abs(bt.rows[t].nu_hat(0)) + 1e-15);
    EXPECT_EQ(bt.rows[t].rho(0), bt.rows[t].a * bt.rows[t].nu_hat(0));
  }
  EXPECT_THROW(run_backtest(one_fund_series(100, 2), short_burn_in(100)), InsufficientBurnIn);
}

TEST(Backtest, PsdOrderOfCumulativeCovariation) {
  Rng rng(52);
  const MarketPath p = simulate_path(random_normal_vector(2, rng), random_spd(2, rng), uniform_clock(0, 0.01, 400), 3);
  const BacktestSeries bt = run_backtest(series_from_path(p, Date{2000, 1, 3}), short_burn_in(50));
  for (std::size_t t = 1; t < bt.rows.size(); ++t) {
    const Matrix d = bt.rows[t].C - bt.rows[t - 1].C;
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Matrix>(d).eigenvalues()(0), -1e-12);
  }
}

TEST(Backtest, ZeroReturnsFreezeEstimates) {
  ReturnSeries s = one_fund_series(400, 3);
  for (Eigen::Index t = 300; t < 400; ++t) s.fund_returns(t, 0) = s.risk_free[t];
  const BacktestSeries bt = run_backtest(s, short_burn_in(300));
  const BacktestRow& first = bt.rows.front();
  for (const auto& r : bt.rows) {
    EXPECT_EQ(r.nu_hat(0), first.nu_hat(0));
    EXPECT_EQ(r.a, first.a);
    EXPECT_EQ(r.log_nu_hat, 0.0);
    EXPECT_EQ(r.log_shrunk, 0.0);
    EXPECT_EQ(r.F, 0.0);
  }
}

TEST(Backtest, ForcedFactorAndForcedPortfolio) {
  const ReturnSeries s = one_fund_series(800, 4);
  BacktestConfig unit = short_burn_in();
  unit.fixed_a = 1.0;
  for (const auto& w : wealth_tracks(run_backtest(s, unit))) EXPECT_EQ(w.shrunk, w.nu_hat);
  BacktestConfig zero = short_burn_in();
  zero.fixed_nu_hat = Vector::Zero(1);
  for (const auto& w : wealth_tracks(run_backtest(s, zero))) {
    EXPECT_EQ(w.nu_hat, 0.0);
    EXPECT_EQ(w.shrunk, 0.0);
    EXPECT_EQ(w.F, 0.0);
  }
}

TEST(Backtest, DeterministicAndStreamEquivalent) {
  const ReturnSeries s = one_fund_series(1500, 5);
  const BacktestConfig cfg = short_burn_in(300);
  std::ostringstream a, b, c;
  write_backtest_csv(run_backtest(s, cfg), a);
  write_backtest_csv(run_backtest(s, cfg), b);
  EXPECT_EQ(a.str(), b.str());
  Backtester engine(1, cfg);
  for (std::size_t start = 0; start < s.size(); start += 137) engine.push(s, start, std::min(s.size(), start + 137));
  write_backtest_csv(engine.series(), c);
  EXPECT_EQ(a.str(), c.str());
}

TEST(Backtest, CalendarClockCountsDays) {
  const ReturnSeries s = one_fund_series(600, 6);
  BacktestConfig cfg;
  cfg.clock = ClockMode::Calendar;
  cfg.burn_in_days = 365;
  const BacktestSeries bt = run_backtest(s, cfg);
  EXPECT_GE(bt.rows.front().date.days_since_epoch() - s.dates.front().days_since_epoch(), 365);
  EXPECT_LT(s.dates[bt.burn_in - 1].days_since_epoch() - s.dates.front().days_since_epoch(), 365);
}

TEST(Backtest, AnchoredTruncatedAndDemeanedModes) {
  const ReturnSeries s = one_fund_series(900, 7);
  BacktestConfig anchored = short_burn_in(0);
  anchored.prior = PriorMode::Anchored;
  anchored.prior_mean = Vector::Constant(1, 1.0);
  anchored.prior_cov = CovMatrix::scalar(4.0);
  const BacktestSeries a = run_backtest(s, anchored);
  EXPECT_NEAR(a.rows.front().nu_hat(0), (0.25 + s.excess_returns()(0, 0)) /
                                             (0.25 + std::pow(s.excess_returns()(0, 0), 2)), 1e-12);

  BacktestConfig truncated = short_burn_in();
  truncated.truncation_l = 0.0;
  truncated.truncation_r = 1.0;
  for (const auto& r : run_backtest(s, truncated).rows) {
    EXPECT_GT(r.nu_hat(0), 0.0);
    EXPECT_LT(r.nu_hat(0), 1.0);
    EXPECT_LE(r.kappa(0, 0), 1.0 / r.C(0, 0) + 1e-15);
  }

  BacktestConfig demeaned = short_burn_in();
  demeaned.covariance = CovarianceMode::Demeaned;
  const BacktestSeries d = run_backtest(s, demeaned);
  const BacktestSeries raw = run_backtest(s, short_burn_in());
  EXPECT_LT(d.rows.back().C(0, 0), raw.rows.back().C(0, 0));

  BacktestConfig bad = short_burn_in();
  bad.truncation_l = 1.0;
  bad.truncation_r = 0.0;
  EXPECT_THROW(run_backtest(s, bad), ConfigError);
}

TEST(Backtest, CsvSchema) {
  Rng rng(53);
  const MarketPath p = simulate_path(random_normal_vector(2, rng), random_spd(2, rng), uniform_clock(0, 0.01, 60), 3);
  std::ostringstream out;
  write_backtest_csv(run_backtest(series_from_path(p, Date{2000, 1, 3}), short_burn_in(10)), out);
  const std::string header = out.str().substr(0, out.str().find('\n'));
  EXPECT_EQ(header, "date,nu_hat_1,nu_hat_2,a,F,logW_market,logW_nuhat,logW_shrunk,O,C_1_1,C_1_2,C_2_2");
}

TEST(Backtest, PosteriorCoverageOfTrueNu) {
  int covered = 0;
  const int runs = 1000;
  for (int k = 0; k < runs; ++k) {
    const BacktestSeries bt = run_backtest(one_fund_series(1000, 1000 + k), short_burn_in(100));
    const BacktestRow& last = bt.rows.back();
    if (std::abs(last.nu_hat(0) - 2.22) <= 1.959964 * std::sqrt(last.kappa(0, 0))) ++covered;
  }
  const double rate = static_cast<double>(covered) / runs;
  EXPECT_GE(rate, 0.93);
  EXPECT_LE(rate, 0.97);
}

TEST(Backtest, ShrinkageReducesVolatilityAndTracksF) {
  int lower_var = 0, better_tracking = 0;
  const int runs = 100;
  for (int k = 0; k < runs; ++k) {
    const BacktestSeries bt = run_backtest(one_fund_series(3000, 5000 + k), short_burn_in(1000));
    std::vector<double> dn, ds;
    double msd_n = 0.0, msd_s = 0.0;
    for (std::size_t t = 1; t < bt.rows.size(); ++t) {
      const double dF = bt.rows[t].F - bt.rows[t - 1].F;
      dn.push_back(bt.rows[t].log_nu_hat - bt.rows[t - 1].log_nu_hat);
      ds.push_back(bt.rows[t].log_shrunk - bt.rows[t - 1].log_shrunk);
      msd_n += (dn.back() - dF) * (dn.back() - dF);
      msd_s += (ds.back() - dF) * (ds.back() - dF);
    }
    if (variance(ds) < variance(dn)) ++lower_var;
    if (msd_s <= msd_n) ++better_tracking;
  }
  EXPECT_GE(lower_var, 95);
  EXPECT_GE(better_tracking, 90);
}
