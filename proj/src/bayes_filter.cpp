#include "fundgrowth/bayes_filter.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "fundgrowth/errors.hpp"
#include "fundgrowth/random_instances.hpp"

namespace fundgrowth {
namespace {

double phi(double x) {
  if (std::isinf(x)) return 0.0;
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// x * phi(x), with the limit 0 at +-infinity.
double x_phi(double x) { return std::isinf(x) ? 0.0 : x * phi(x); }

// Upper tail 1 - Phi(x), accurate for large positive x.
double upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

void require_dims(const CovMatrix& a, const CovMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("covariance dimensions differ");
}

}  // namespace

PosteriorState gaussian_posterior(const Vector& R, const CovMatrix& C) {
  if (R.size() != C.dim()) throw DimensionMismatch("R and C sizes differ");
  if (!C.is_positive_definite()) throw SingularC("cumulative covariation C is not positive definite");
  PosteriorState s;
  s.R = R;
  s.C = C;
  s.nu_hat = C.solve(R);
  s.kappa = CovMatrix(C.inverse());
  return s;
}

PosteriorState anchored_prior(const Vector& nu0, const CovMatrix& kappa0) {
  if (!kappa0.is_positive_definite()) throw SingularC("prior covariance must be positive definite");
  const CovMatrix C0(kappa0.inverse());
  return gaussian_posterior(C0.matrix() * nu0, C0);
}

PosteriorState update(const PosteriorState& state, const Vector& dR, const Matrix& dC) {
  const Vector R = state.R + dR;
  const CovMatrix C(state.C.matrix() + dC);
  if (state.truncation) {
    return truncated_posterior_1d(R(0), C(0, 0), state.truncation->lo, state.truncation->hi);
  }
  return gaussian_posterior(R, C);
}

PosteriorState truncated_posterior_1d(double R, double C, double l, double r) {
  if (!(C > 0.0)) throw SingularC("C must be positive");
  if (!(l < r)) throw DegenerateInterval("truncation requires l < r");

  const double root = std::sqrt(C);
  const double center = R / C;
  // Standardised bounds; reflect so the interval does not lie entirely in the right tail.
  double lb = l * root - R / root;
  double rb = r * root - R / root;
  const bool reflect = lb > 0.0;
  if (reflect) {
    const double t = lb;
    lb = -rb;
    rb = -t;
  }
  double mass;
  if (rb <= 0.0) {
    // Both bounds in the left tail: Phi(rb) - Phi(lb) = Q(-rb) - Q(-lb).
    mass = upper_tail(-rb) - upper_tail(-lb);
  } else {
    mass = 1.0 - upper_tail(-lb) - upper_tail(rb);
  }
  if (!(mass >= 1e-300)) throw DegenerateInterval("truncation interval has negligible posterior mass");

  const double ratio = (phi(lb) - phi(rb)) / mass;
  double shift = ratio / root;
  if (reflect) shift = -shift;
  const double var = (1.0 + (x_phi(lb) - x_phi(rb)) / mass - ratio * ratio) / C;

  PosteriorState s;
  s.R = Vector::Constant(1, R);
  s.C = CovMatrix::scalar(C);
  double mean = center + shift;
  // Round-off can push the mean onto a finite bound for extremely narrow intervals.
  mean = std::clamp(mean, std::nextafter(l, r), std::nextafter(r, l));
  s.nu_hat = Vector::Constant(1, mean);
  s.kappa = CovMatrix::scalar(std::clamp(var, std::numeric_limits<double>::min(), 1.0 / C));
  s.truncation = Interval{l, r};
  return s;
}

PosteriorState truncated_posterior_box_mc(const Vector& R, const CovMatrix& C, const Vector& lo,
                                          const Vector& hi, std::size_t draws, std::uint64_t seed) {
  const PosteriorState base = gaussian_posterior(R, C);
  const Eigen::Index n = R.size();
  if (lo.size() != n || hi.size() != n) throw DimensionMismatch("box bounds have wrong size");
  const IncrementSampler sampler(base.kappa);
  Rng rng(seed);
  Vector sum = Vector::Zero(n);
  Matrix outer = Matrix::Zero(n, n);
  std::size_t accepted = 0;
  Vector x(n);
  for (std::size_t i = 0; i < draws; ++i) {
    sampler.sample_into(rng, base.nu_hat, 1.0, x);
    if (((x - lo).array() > 0.0).all() && ((hi - x).array() > 0.0).all()) {
      sum += x;
      outer += x * x.transpose();
      ++accepted;
    }
  }
  if (accepted < 2) throw DegenerateInterval("no draws fell inside the truncation box");
  PosteriorState s = base;
  const double m = static_cast<double>(accepted);
  s.nu_hat = sum / m;
  s.kappa = CovMatrix(outer / m - s.nu_hat * s.nu_hat.transpose(), base.kappa.max_eigenvalue());
  return s;
}

double f_growth_increment(const Vector& nu_hat, const CovMatrix& dC) {
  if (nu_hat.size() != dC.dim()) throw DimensionMismatch("nu_hat and dC sizes differ");
  return 0.5 * dC.quadratic_form(nu_hat);
}

double growth_loss(const CovMatrix& kappa, const CovMatrix& dC) {
  require_dims(kappa, dC);
  return 0.5 * (kappa.matrix() * dC.matrix()).trace();
}

double restricted_growth_loss(const CovMatrix& kappa, const CovMatrix& dC, const Projection& p) {
  require_dims(kappa, dC);
  if (p.dim() != dC.dim()) throw DimensionMismatch("projection dimension differs");
  if (p.rank() == 0) return 0.0;
  const Matrix pinv = subspace_pinv(dC, p);
  const Matrix& P = p.matrix();
  const Matrix& d = dC.matrix();
  return 0.5 * (pinv * P * d * kappa.matrix() * d * P).trace();
}

double portfolio_growth_variance(const Vector& pi, const CovMatrix& kappa, const CovMatrix& dC) {
  require_dims(kappa, dC);
  if (pi.size() != dC.dim()) throw DimensionMismatch("pi has wrong size");
  const Vector v = dC.matrix() * pi;
  return kappa.quadratic_form(v);
}

}  // namespace fundgrowth
