#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fundgrowth/psd_linalg.hpp"
#include "fundgrowth/random_instances.hpp"

namespace fundgrowth {

/// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return lo < x && x < hi; }
};

/// Gaussian prior on the growth-optimal portfolio, optionally truncated (one asset only).
struct PriorSpec {
  Vector mean;
  CovMatrix cov;
  std::optional<Interval> truncation;

  /// Throws DimensionMismatch or BadTruncation.
  void validate() const;
};

Vector draw_prior(const PriorSpec& spec, std::uint64_t seed);
Vector draw_prior(const PriorSpec& spec, Rng& rng);

/// Draws Gaussian increments with covariance c * dO.
class IncrementSampler {
 public:
  explicit IncrementSampler(const CovMatrix& c);
  Eigen::Index dim() const { return root_.rows(); }
  /// drift + sqrt(dO) c^{1/2} xi, xi standard normal.
  Vector sample(Rng& rng, const Vector& drift, double dO) const;
  void sample_into(Rng& rng, const Vector& drift, double dO, Eigen::Ref<Vector> out) const;

 private:
  Matrix root_;
  mutable Vector xi_;
};

/// Operational-clock grid O(0), O(0)+step, ..., O(0)+n*step.
std::vector<double> uniform_clock(double start, double step, std::size_t steps);

struct MarketPath {
  std::vector<double> times;   ///< operational clock, size steps+1
  Matrix increments;           ///< steps x I excess-return increments
  Vector nu_true;
  CovMatrix cov_rate;
  std::uint64_t seed = 0;

  Eigen::Index steps() const { return increments.rows(); }
  double elapsed() const { return times.back() - times.front(); }
};

/// Euler scheme dR = c nu dO + c^{1/2} sqrt(dO) xi on the given clock.
/// Throws EmptyGrid for fewer than two grid points, SingularC if c is not full rank.
MarketPath simulate_path(const Vector& nu, const CovMatrix& c, std::span<const double> clock,
                         std::uint64_t seed);

/// ||sum dR dR^T - c (O_n - O_0)||_F / ||c (O_n - O_0)||_F.
double quadratic_variation_error(const MarketPath& path);

/// Fund model: dR = beta dR_f + dN with (dN)(dR_f) = 0.
struct FundSpec {
  Eigen::Index assets = 0;
  Eigen::Index funds = 0;
  Matrix f;                 ///< I x K loadings
  Matrix beta;              ///< I x K, beta = c f (f^T c f)^{-1}
  CovMatrix residual_cov;   ///< covariance rate of dN
  CovMatrix cov_rate;       ///< c

  /// beta applied to fund returns, i.e. the projection I - beta f^T removed.
  Matrix residual_operator() const;
};

/// Throws RankDeficient if f has dependent columns or f^T c f is singular.
FundSpec build_fund_model(const CovMatrix& c, const Matrix& f);

/// Path generated through the fund structure: fund returns with drift f^T c f theta dO,
/// plus residual noise drawn independently with covariance residual_cov dO.
MarketPath simulate_fund_path(const FundSpec& spec, const Vector& theta,
                              std::span<const double> clock, std::uint64_t seed);

struct ResidualDriftEstimate {
  Vector drift;       ///< per-asset mean residual increment
  Vector std_error;   ///< Monte-Carlo standard error
  std::size_t paths = 0;

  /// drift / std_error, entries with zero error reported as 0 (exact) or inf.
  Vector z_scores() const;
  double max_abs_z() const;
  bool all_within(double k) const { return max_abs_z() <= k; }
};

/// Monte-Carlo estimate of the residual drift with nu = f theta, one increment of length dO per path.
ResidualDriftEstimate residual_drift_check(const FundSpec& spec, const Vector& theta,
                                           std::size_t n_paths, std::uint64_t seed,
                                           double dO = 1.0);
/// Same, for an arbitrary growth-optimal portfolio nu (not necessarily in span(f)).
ResidualDriftEstimate residual_drift_check_nu(const FundSpec& spec, const Vector& nu,
                                              std::size_t n_paths, std::uint64_t seed,
                                              double dO = 1.0);

}  // namespace fundgrowth
