#include "fundgrowth/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "fundgrowth/backtest.hpp"
#include "fundgrowth/errors.hpp"
#include "fundgrowth/report.hpp"
#include "fundgrowth/return_series.hpp"
#include "fundgrowth/scenario_config.hpp"
#include "fundgrowth/verify.hpp"

namespace fundgrowth::cli {
namespace {

namespace fs = std::filesystem;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string input;
  std::vector<std::string> checks;
  std::optional<std::size_t> instances;
  std::optional<std::string> sabotage;
};

RunConfig load(const Options& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_run_config(o.config);
  if (o.seed) cfg.seed = o.seed;
  return cfg;
}

std::uint64_t seed_of(const RunConfig& cfg) { return cfg.seed.value_or(kDefaultSeed); }

fs::path prepare_out(const Options& o) {
  const fs::path dir(o.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error("cannot create output directory " + dir.string());
  return dir;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const RunConfig cfg = load(o);
  const std::uint64_t seed = seed_of(cfg);
  const ScenarioConfig& sc = cfg.scenario;
  const SimulatedScenario sim = simulate_scenario(sc, seed);
  const ReturnSeries series = series_from_path(sim.path, sc.start_date, sc.risk_free);
  const fs::path file = prepare_out(o) / "returns.csv";
  write_return_csv(series, file);

  const double n = static_cast<double>(sim.path.steps());
  out << "wrote " << file.string() << " (" << series.size() << " rows, seed " << seed << ")\n"
      << "realized quadratic variation relative error " << quadratic_variation_error(sim.path)
      << " (reference 5/sqrt(n) = " << 5.0 / std::sqrt(n) << ")\n";
  if (sim.fund_model) {
    const ResidualDriftEstimate est = residual_drift_check(*sim.fund_model, *sim.theta, sc.residual_drift_paths,
                                                           derive_seed(seed, 3), sc.clock_step);
    out << "residual drift over " << est.paths << " paths: max |z| = " << est.max_abs_z()
        << (est.all_within(4.0) ? " (within 4 SE of 0)" : " (outside 4 SE of 0)") << '\n';
  }
  return kExitOk;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = load(o);
  VerifyOptions vo;
  vo.checks = o.checks;
  vo.instances = o.instances;
  vo.seed = seed_of(cfg);
  vo.sabotage = o.sabotage;
  const auto results = run_checks(vo);
  print_check_table(results, out);
  std::vector<std::string> failed;
  for (const auto& r : results) {
    if (!r.passed()) failed.push_back(r.name);
  }
  if (failed.empty()) return kExitOk;
  err << "failed checks:";
  for (const auto& f : failed) err << ' ' << f;
  err << '\n';
  return kExitCheckFailed;
}

int cmd_backtest(const Options& o, std::ostream& out) {
  const RunConfig cfg = load(o);
  const ReturnSeries series = ingest_csv(o.input, cfg.csv);
  for (const auto& w : series.warnings) out << "warning: " << w << '\n';
  const BacktestSeries bt = run_backtest(series, cfg.backtest);
  const fs::path file = prepare_out(o) / "backtest.csv";
  write_backtest_csv(bt, file);
  const BacktestRow& last = bt.rows.back();
  out << "read " << series.rows_read << " rows, dropped " << series.dropped_rows << ", burn-in " << bt.burn_in
      << ", displayed " << bt.rows.size() << '\n'
      << "wrote " << file.string() << '\n'
      << "final a = " << last.a << ", logW_market = " << last.log_market << ", logW_nuhat = " << last.log_nu_hat
      << ", logW_shrunk = " << last.log_shrunk << ", F = " << last.F << '\n'
      << "max daily compounding gap " << bt.max_discretisation_gap << '\n';
  return kExitOk;
}

int cmd_report(const Options& o, std::ostream& out) {
  const BacktestTable table = read_backtest_table(fs::path(o.input));
  const ReportFiles files = write_report(table, prepare_out(o));
  for (const auto& p : files.panels) out << "wrote " << p.string() << '\n';
  out << "wrote " << files.combined_csv.string() << '\n';
  return kExitOk;
}

}  // namespace

int run(int argc, char** argv) { return run(argc, argv, std::cout, std::cerr); }

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Growth-optimal portfolio estimation, shrinkage and backtesting"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key=value scenario file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "base seed (default " + std::to_string(kDefaultSeed) + ")");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
  };

  CLI::App* simulate = app.add_subcommand("simulate", "simulate a return path and write returns.csv");
  add_common(simulate);

  CLI::App* verify = app.add_subcommand("verify", "run the property sweeps");
  add_common(verify);
  verify->add_option("--checks", o.checks, "comma separated check names")->delimiter(',');
  verify->add_option("--instances", o.instances, "instances per check");
  verify->add_option("--sabotage", o.sabotage, "perturb one check (harness self-test)");

  CLI::App* backtest = app.add_subcommand("backtest", "run the backtest on a return CSV");
  add_common(backtest);
  backtest->add_option("--input", o.input, "date,ret_1..ret_K,rf CSV")->required()->check(CLI::ExistingFile);

  CLI::App* report = app.add_subcommand("report", "render the four panels from backtest output");
  add_common(report);
  report->add_option("--input", o.input, "backtest.csv")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*simulate) return cmd_simulate(o, out);
    if (*verify) return cmd_verify(o, out, err);
    if (*backtest) return cmd_backtest(o, out);
    return cmd_report(o, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace fundgrowth::cli
