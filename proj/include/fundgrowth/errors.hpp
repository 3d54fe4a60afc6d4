#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fundgrowth {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FUNDGROWTH_DEFINE_ERROR(Name)     \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

FUNDGROWTH_DEFINE_ERROR(NotPositiveSemidefinite);
FUNDGROWTH_DEFINE_ERROR(DimensionMismatch);
FUNDGROWTH_DEFINE_ERROR(RankDeficient);
FUNDGROWTH_DEFINE_ERROR(SingularOnSubspace);
FUNDGROWTH_DEFINE_ERROR(SingularCrossCovariance);
FUNDGROWTH_DEFINE_ERROR(SingularC);
FUNDGROWTH_DEFINE_ERROR(DegenerateInterval);
FUNDGROWTH_DEFINE_ERROR(NoConvergence);
FUNDGROWTH_DEFINE_ERROR(BadTruncation);
FUNDGROWTH_DEFINE_ERROR(EmptyGrid);
FUNDGROWTH_DEFINE_ERROR(NonMonotoneDates);
FUNDGROWTH_DEFINE_ERROR(EmptySeries);
FUNDGROWTH_DEFINE_ERROR(InsufficientBurnIn);
FUNDGROWTH_DEFINE_ERROR(MissingColumns);
FUNDGROWTH_DEFINE_ERROR(EmptyRange);
FUNDGROWTH_DEFINE_ERROR(ConfigError);

#undef FUNDGROWTH_DEFINE_ERROR

/// Malformed input line; `line()` is 1-based and counts the header.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace fundgrowth
