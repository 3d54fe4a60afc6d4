#include "fundgrowth/return_series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "fundgrowth/errors.hpp"

namespace fundgrowth {
namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view s) { return s.empty() || s == "NA" || s == "NaN" || s == "nan"; }

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

Matrix ReturnSeries::excess_returns() const {
  Matrix x = fund_returns;
  for (Eigen::Index t = 0; t < x.rows(); ++t) x.row(t).array() -= risk_free[t];
  return x;
}

ReturnSeries parse_return_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) break;
  }
  if (trim(line).empty()) throw EmptySeries("input has no header");

  const auto header = split(trim(line), ',');
  if (header.size() < 3 || trim(header.front()) != "date" || trim(header.back()) != "rf") {
    throw ParseError(line_no, "header must be date,ret_1,...,ret_K,rf");
  }
  const std::size_t funds = header.size() - 2;
  for (std::size_t k = 0; k < funds; ++k) {
    if (trim(header[k + 1]) != "ret_" + std::to_string(k + 1)) {
      throw ParseError(line_no, "expected column ret_" + std::to_string(k + 1));
    }
  }

  ReturnSeries series;
  std::vector<Vector> rows;
  std::optional<double> last_rf;

  auto reject = [&](const std::string& why) {
    if (options.drop_policy == DropPolicy::Error) throw ParseError(line_no, why);
    series.warnings.push_back("line " + std::to_string(line_no) + ": " + why + " (row dropped)");
    ++series.dropped_rows;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    ++series.rows_read;
    const auto fields = split(text, ',');
    if (fields.size() != header.size()) {
      reject("expected " + std::to_string(header.size()) + " fields, got " +
             std::to_string(fields.size()));
      continue;
    }
    const auto date = Date::parse(trim(fields[0]));
    if (!date) {
      reject("bad date '" + std::string(trim(fields[0])) + "'");
      continue;
    }
    Vector ret(static_cast<Eigen::Index>(funds));
    bool missing = false;
    bool malformed = false;
    for (std::size_t k = 0; k < funds; ++k) {
      const auto field = trim(fields[k + 1]);
      if (is_missing(field)) {
        missing = true;
        continue;
      }
      const auto v = parse_number(field);
      if (!v) {
        malformed = true;
        break;
      }
      ret(static_cast<Eigen::Index>(k)) = *v;
    }
    if (malformed) {
      reject("bad fund return");
      continue;
    }
    const auto rf_field = trim(fields.back());
    std::optional<double> rf;
    if (!is_missing(rf_field)) {
      rf = parse_number(rf_field);
      if (!rf) {
        reject("bad risk-free rate");
        continue;
      }
      last_rf = rf;
    } else {
      rf = last_rf;
    }
    if (missing) {
      ++series.dropped_rows;
      continue;
    }
    if (!rf) {
      reject("risk-free rate missing with nothing to forward-fill");
      continue;
    }
    series.dates.push_back(*date);
    series.risk_free.push_back(*rf);
    rows.push_back(std::move(ret));
  }

  if (rows.empty()) throw EmptySeries("no usable rows");

  const auto n = series.dates.size();
  const bool descending =
      n > 1 && std::adjacent_find(series.dates.begin(), series.dates.end(),
                                  [](const Date& a, const Date& b) { return !(a > b); }) ==
                   series.dates.end();
  if (descending) {
    std::reverse(series.dates.begin(), series.dates.end());
    std::reverse(series.risk_free.begin(), series.risk_free.end());
    std::reverse(rows.begin(), rows.end());
  }
  for (std::size_t t = 1; t < n; ++t) {
    if (!(series.dates[t - 1] < series.dates[t])) {
      throw NonMonotoneDates("dates not strictly increasing at " + series.dates[t].iso());
    }
  }

  series.fund_returns.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(funds));
  for (std::size_t t = 0; t < n; ++t) series.fund_returns.row(static_cast<Eigen::Index>(t)) = rows[t];
  return series;
}

ReturnSeries ingest_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  return parse_return_csv(in, options);
}

void write_return_csv(const ReturnSeries& series, std::ostream& out) {
  out << "date";
  for (Eigen::Index k = 0; k < series.funds(); ++k) out << ",ret_" << (k + 1);
  out << ",rf\n";
  for (std::size_t t = 0; t < series.size(); ++t) {
    out << series.dates[t].iso();
    for (Eigen::Index k = 0; k < series.funds(); ++k) {
      out << ',' << format_double(series.fund_returns(static_cast<Eigen::Index>(t), k));
    }
    out << ',' << format_double(series.risk_free[t]) << '\n';
  }
}

void write_return_csv(const ReturnSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  write_return_csv(series, out);
}

ReturnSeries series_from_path(const MarketPath& path, Date start, double risk_free) {
  ReturnSeries series;
  const auto n = static_cast<std::size_t>(path.steps());
  series.dates.reserve(n);
  Date d = start.weekday() >= 5 ? start.next_weekday() : start;
  for (std::size_t t = 0; t < n; ++t) {
    series.dates.push_back(d);
    d = d.next_weekday();
  }
  series.fund_returns = path.increments.array() + risk_free;
  series.risk_free.assign(n, risk_free);
  series.rows_read = n;
  return series;
}

}  // namespace fundgrowth
