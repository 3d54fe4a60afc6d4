#include "fundgrowth/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "fundgrowth/errors.hpp"
#include "fundgrowth/return_series.hpp"
#include "fundgrowth/svg_chart.hpp"

namespace fundgrowth {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_cell(const std::string& s, std::size_t line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc() || ptr != end) throw ParseError(line, "bad number '" + s + "'");
  return v;
}

std::string k_name(const char* prefix, Eigen::Index k) { return prefix + std::to_string(k + 1); }
std::string diag_name(Eigen::Index k) {
  return "C_" + std::to_string(k + 1) + "_" + std::to_string(k + 1);
}

std::vector<double> years(const BacktestTable& t) {
  std::vector<double> x;
  x.reserve(t.size());
  for (const auto& d : t.dates) x.push_back(d.decimal_year());
  return x;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

Eigen::Index BacktestTable::funds() const {
  Eigen::Index k = 0;
  while (has(k_name("nu_hat_", k))) ++k;
  return k;
}

bool BacktestTable::has(const std::string& name) const {
  return std::find(columns.begin(), columns.end(), name) != columns.end();
}

Vector BacktestTable::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw MissingColumns("missing column " + name);
  return values.col(static_cast<Eigen::Index>(it - columns.begin()));
}

BacktestTable read_backtest_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw MissingColumns("backtest output has no header");
  auto header = split_csv(line);
  if (header.empty() || header.front() != "date") throw MissingColumns("first column must be date");

  BacktestTable t;
  t.columns.assign(header.begin() + 1, header.end());
  std::vector<std::string> missing;
  for (const char* name : {"a", "F", "logW_market", "logW_nuhat", "logW_shrunk"}) {
    if (!t.has(name)) missing.emplace_back(name);
  }
  const Eigen::Index K = t.funds();
  if (K == 0) missing.emplace_back("nu_hat_1");
  for (Eigen::Index k = 0; k < K; ++k) {
    if (!t.has(diag_name(k))) missing.push_back(diag_name(k));
  }
  if (!missing.empty()) {
    std::string msg = "missing columns:";
    for (const auto& m : missing) msg += " " + m;
    throw MissingColumns(msg);
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) throw ParseError(line_no, "wrong number of fields");
    const auto d = Date::parse(cells.front());
    if (!d) throw ParseError(line_no, "bad date '" + cells.front() + "'");
    if (!t.dates.empty() && !(t.dates.back() < *d)) throw NonMonotoneDates("dates not increasing at " + d->iso());
    t.dates.push_back(*d);
    std::vector<double> r;
    for (std::size_t c = 1; c < cells.size(); ++c) r.push_back(parse_cell(cells[c], line_no));
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw EmptyRange("backtest output has no post burn-in rows");
  t.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(t.columns.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      t.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return t;
}

BacktestTable read_backtest_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return read_backtest_table(in);
}

std::vector<std::string> render_panels(const BacktestTable& table) {
  const auto x = years(table);
  const Eigen::Index K = table.funds();
  const Vector a = table.column("a");

  LineChart portfolio{"Growth-optimal estimate and its shrunk version", "weight", {}};
  for (Eigen::Index k = 0; k < K; ++k) {
    const Vector nu = table.column(k_name("nu_hat_", k));
    const std::string suffix = K > 1 ? " " + std::to_string(k + 1) : "";
    portfolio.series.push_back({"nu_hat" + suffix, x, to_std(nu)});
    portfolio.series.push_back({"a nu_hat" + suffix, x, to_std(nu.cwiseProduct(a))});
  }

  LineChart factor{"Uniform shrinkage factor", "a", {{"a", x, to_std(a)}}};

  LineChart wealth{"Log wealth and maximal achievable growth", "log scale",
                   {{"market", x, to_std(table.column("logW_market"))},
                    {"nu_hat", x, to_std(table.column("logW_nuhat"))},
                    {"a nu_hat", x, to_std(table.column("logW_shrunk"))},
                    {"F", x, to_std(table.column("F"))}}};

  LineChart variation{"Cumulative quadratic variation", "C", {}};
  for (Eigen::Index k = 0; k < K; ++k) {
    variation.series.push_back({diag_name(k), x, to_std(table.column(diag_name(k)))});
  }

  return {render_svg(portfolio), render_svg(factor), render_svg(wealth), render_svg(variation)};
}

void write_combined_csv(const BacktestTable& table, std::ostream& out) {
  const Eigen::Index K = table.funds();
  const Vector a = table.column("a");
  std::vector<Vector> cols;
  out << "date";
  for (Eigen::Index k = 0; k < K; ++k) out << ",nu_hat_" << k + 1;
  for (Eigen::Index k = 0; k < K; ++k) out << ",shrunk_" << k + 1;
  out << ",a,logW_market,logW_nuhat,logW_shrunk,F";
  for (Eigen::Index k = 0; k < K; ++k) out << ',' << diag_name(k);
  out << '\n';
  for (Eigen::Index k = 0; k < K; ++k) cols.push_back(table.column(k_name("nu_hat_", k)));
  for (Eigen::Index k = 0; k < K; ++k) cols.push_back(cols[k].cwiseProduct(a));
  cols.push_back(a);
  for (const char* name : {"logW_market", "logW_nuhat", "logW_shrunk", "F"}) cols.push_back(table.column(name));
  for (Eigen::Index k = 0; k < K; ++k) cols.push_back(table.column(diag_name(k)));
  for (std::size_t t = 0; t < table.size(); ++t) {
    out << table.dates[t].iso();
    for (const auto& c : cols) out << ',' << format_double(c(static_cast<Eigen::Index>(t)));
    out << '\n';
  }
}

ReportFiles write_report(const BacktestTable& table, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  static const char* names[] = {"panel_1_portfolio.svg", "panel_2_shrinkage.svg", "panel_3_wealth.svg",
                                "panel_4_variation.svg"};
  ReportFiles files;
  const auto panels = render_panels(table);
  for (std::size_t i = 0; i < panels.size(); ++i) {
    const auto path = out_dir / names[i];
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << panels[i];
    files.panels.push_back(path);
  }
  files.combined_csv = out_dir / "report.csv";
  std::ofstream csv(files.combined_csv, std::ios::binary);
  if (!csv) throw Error("cannot write " + files.combined_csv.string());
  write_combined_csv(table, csv);
  return files;
}

}  // namespace fundgrowth
