#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fundgrowth/dates.hpp"
#include "fundgrowth/psd_linalg.hpp"

namespace fundgrowth {

/// Backtest output read back by column name.
struct BacktestTable {
  std::vector<Date> dates;
  std::vector<std::string> columns;
  Matrix values;  ///< rows = dates, cols = columns (without the date)

  std::size_t size() const { return dates.size(); }
  Eigen::Index funds() const;
  bool has(const std::string& name) const;
  /// Throws MissingColumns.
  Vector column(const std::string& name) const;
};

/// Throws MissingColumns unless date, nu_hat_1..K, a, F, logW_market, logW_nuhat,
/// logW_shrunk and C_k_k are present; EmptyRange when there are no data rows.
BacktestTable read_backtest_table(std::istream& in);
BacktestTable read_backtest_table(const std::filesystem::path& path);

struct ReportFiles {
  std::vector<std::filesystem::path> panels;  ///< four SVG documents
  std::filesystem::path combined_csv;
};

/// Panels: (1) nu_hat and a nu_hat, (2) a, (3) log-wealth tracks and F, (4) diagonal of C.
std::vector<std::string> render_panels(const BacktestTable& table);
/// date,nu_hat_k,shrunk_k,a,logW_market,logW_nuhat,logW_shrunk,F,C_k_k
void write_combined_csv(const BacktestTable& table, std::ostream& out);
ReportFiles write_report(const BacktestTable& table, const std::filesystem::path& out_dir);

}  // namespace fundgrowth
