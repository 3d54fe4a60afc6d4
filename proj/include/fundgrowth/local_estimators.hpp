#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "fundgrowth/psd_linalg.hpp"

namespace fundgrowth {

/// Return increments over a short window, each spanning `dO` of operational time.
/// The covariance rate is taken as observed.
struct LocalWindow {
  Matrix increments;   ///< n x I
  CovMatrix cov_rate;  ///< c
  double dO = 1.0;     ///< clock length of one increment
  Matrix combination;  ///< x, I x K

  double horizon() const { return dO * static_cast<double>(increments.rows()); }
};

/// Cross covariation x^T c y dO.
Matrix cross_covariation(const Matrix& x, const Matrix& y, const CovMatrix& c, double dO);

/// theta_hat(x) = (dC_xf)^{-1} x^T (sum of increments), with dC_xf over the whole window.
/// Throws SingularCrossCovariance.
Vector estimate_theta(const LocalWindow& w, const Matrix& f);

/// tr((dC_xf)^{-1} dC_xx (dC_fx)^{-1}).
double mse(const Matrix& x, const Matrix& f, const CovMatrix& c, double dO);

/// 1/2 tr((dC_ff)^{1/2} (dC_xf)^{-1} dC_xx (dC_fx)^{-1} (dC_ff)^{1/2}); equals K/2 at x = f.
double dis(const Matrix& x, const Matrix& f, const CovMatrix& c, double dO);

/// ||c_xx^{1/2} c_fx^{-1} eta||_F^2, finite only where c_fx is invertible.
double frobenius_objective(const CovMatrix& c, const Matrix& eta, const Matrix& f, const Matrix& x);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;

  bool within(double target, double k) const {
    return std::abs(mean - target) <= k * std_error + 1e-12 * std::max(1.0, std::abs(target));
  }
};

/// Mean over simulated single-increment windows of 1/2 ||(dC)^{1/2}(nu_hat(f) - nu)||^2
/// with dC = c dO and nu = f theta.
MonteCarloEstimate mc_distance_from_growth(const Matrix& f, const CovMatrix& c, const Vector& theta,
                                           double dO, std::size_t n_windows, std::uint64_t seed,
                                           double noise_scale = 1.0);

}  // namespace fundgrowth
