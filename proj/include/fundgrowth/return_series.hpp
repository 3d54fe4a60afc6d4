#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fundgrowth/dates.hpp"
#include "fundgrowth/market_sim.hpp"
#include "fundgrowth/psd_linalg.hpp"

namespace fundgrowth {

/// What to do with a row that cannot be parsed.
enum class DropPolicy { Error, Skip };

struct CsvOptions {
  DropPolicy drop_policy = DropPolicy::Error;
};

/// Per-period simple fund returns and the matching risk-free rate.
struct ReturnSeries {
  std::vector<Date> dates;
  Matrix fund_returns;            ///< rows = dates, cols = funds
  std::vector<double> risk_free;
  std::size_t rows_read = 0;      ///< data rows in the source, before cleaning
  std::size_t dropped_rows = 0;
  std::vector<std::string> warnings;

  std::size_t size() const { return dates.size(); }
  Eigen::Index funds() const { return fund_returns.cols(); }
  /// Simple return minus the risk-free rate of the same period.
  Matrix excess_returns() const;
};

/// Reads `date,ret_1,...,ret_K,rf`. Empty or NA fund returns drop the row, an empty or NA
/// rate is forward-filled. A file in strictly descending date order is reversed; any other
/// ordering problem raises NonMonotoneDates. Malformed rows raise ParseError unless the
/// policy is Skip, in which case they are dropped with a warning.
ReturnSeries parse_return_csv(std::istream& in, const CsvOptions& options = {});
ReturnSeries ingest_csv(const std::filesystem::path& path, const CsvOptions& options = {});

void write_return_csv(const ReturnSeries& series, std::ostream& out);
void write_return_csv(const ReturnSeries& series, const std::filesystem::path& path);

/// Series from a simulated path on consecutive weekdays starting at `start`.
/// Fund returns are excess increments plus the constant `risk_free` rate.
ReturnSeries series_from_path(const MarketPath& path, Date start, double risk_free = 0.0);

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace fundgrowth
