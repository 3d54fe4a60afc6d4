#pragma once

#include <iosfwd>

namespace fundgrowth::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `simulate`, `verify`, `backtest` and `report` subcommands.
int run(int argc, char** argv);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace fundgrowth::cli
