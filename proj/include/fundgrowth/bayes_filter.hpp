#pragma once

#include <cstdint>
#include <optional>

#include "fundgrowth/market_sim.hpp"
#include "fundgrowth/psd_linalg.hpp"

namespace fundgrowth {

/// Conditional mean and covariance of the growth-optimal portfolio given the
/// cumulative return R and cumulative covariation C (both including prior anchors).
struct PosteriorState {
  Vector R;
  CovMatrix C;
  Vector nu_hat;
  CovMatrix kappa;
  std::optional<Interval> truncation;

  Eigen::Index dim() const { return R.size(); }
};

/// nu_hat = C^{-1} R, kappa = C^{-1}. Throws SingularC.
PosteriorState gaussian_posterior(const Vector& R, const CovMatrix& C);

/// Anchors R(0) = kappa0^{-1} nu0, C(0) = kappa0^{-1} for a proper Gaussian prior.
PosteriorState anchored_prior(const Vector& nu0, const CovMatrix& kappa0);

/// Adds (dR, dC) to the cumulative processes and recomputes the posterior.
/// A truncated state stays truncated.
PosteriorState update(const PosteriorState& state, const Vector& dR, const Matrix& dC);

/// Truncated-normal posterior on (l, r) for one asset; either end may be infinite.
/// Throws DegenerateInterval when the interval carries less than 1e-300 posterior mass.
PosteriorState truncated_posterior_1d(double R, double C, double l, double r);

/// Monte-Carlo posterior moments for a hyper-rectangle truncation in several dimensions
/// (rejection sampling from the untruncated posterior). Not a closed form.
PosteriorState truncated_posterior_box_mc(const Vector& R, const CovMatrix& C, const Vector& lo,
                                          const Vector& hi, std::size_t draws, std::uint64_t seed);

/// dF = 1/2 nu_hat^T dC nu_hat.
double f_growth_increment(const Vector& nu_hat, const CovMatrix& dC);

/// E^F[dG] - dF = 1/2 tr(kappa dC).
double growth_loss(const CovMatrix& kappa, const CovMatrix& dC);

/// 1/2 tr((dC_PP)^dagger P dC kappa dC P): the loss when investing only in range(p).
double restricted_growth_loss(const CovMatrix& kappa, const CovMatrix& dC, const Projection& p);

/// F-conditional variance of the G-growth of pi: ||kappa^{1/2} dC pi||^2.
double portfolio_growth_variance(const Vector& pi, const CovMatrix& kappa, const CovMatrix& dC);

}  // namespace fundgrowth
