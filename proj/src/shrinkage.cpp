#include "fundgrowth/shrinkage.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <limits>

#include "fundgrowth/errors.hpp"

namespace fundgrowth {
namespace {

constexpr int kMaxIterations = 200;

double tolerance_for(double b) { return 1e-12 * std::max(1.0, b); }

// Plain bisection on g(b) = f(b) - b over [lo, hi] with g(lo) >= 0 >= g(hi).
double bisect(const GapFunction& f, double lo, double hi, int& iterations) {
  for (int i = 0; i < 2000 && hi - lo > 0.0; ++i) {
    ++iterations;
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (f(mid) >= mid) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return (std::abs(f(lo) - lo) <= std::abs(f(hi) - hi)) ? lo : hi;
}

}  // namespace

GapFunction::GapFunction(const CovMatrix& h, const Vector& z) {
  if (h.dim() != z.size()) throw DimensionMismatch("h and z sizes differ");
  spectrum_ = h.eigenvalues();
  weights_ = (h.eigenvectors().transpose() * z).array().square();
}

double GapFunction::operator()(double b) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < spectrum_.size(); ++i) {
    const double s = spectrum_(i);
    if (s <= 0.0) continue;
    const double ratio = s / (s + b);
    sum += ratio * ratio * weights_(i);
  }
  return 0.5 * sum;
}

double GapFunction::derivative(double b) const {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < spectrum_.size(); ++i) {
    const double s = spectrum_(i);
    if (s <= 0.0) continue;
    const double denom = s + b;
    sum += s * s * weights_(i) / (denom * denom * denom);
  }
  return -sum;
}

FixedPointSolution solve_b(const CovMatrix& h, const Vector& z) {
  if (!z.allFinite()) throw Error("solve_b: z must be finite");
  FixedPointSolution out;
  const double hz = (h.matrix() * z).norm();
  const double h_norm = h.max_eigenvalue();
  if (hz <= 1e-14 * z.norm() * h_norm || z.norm() == 0.0 || h_norm == 0.0) {
    out.degenerate = true;
    return out;
  }

  const GapFunction f(h, z);
  // upper in U = {f(x) <= x}, lower in L = {x <= f(x)}.
  double upper = f.at_zero();
  double lower = 0.0;
  double f_upper = f(upper);
  int it = 0;
  while (it < kMaxIterations) {
    ++it;
    // Newton step from the upper point stays in L by convexity.
    const double slope = f.derivative(upper);
    const double newton = (f_upper - slope * upper) / (1.0 - slope);
    lower = std::max({lower, f_upper, std::min(newton, upper)});
    const double f_lower = f(lower);
    if (upper - lower <= 4.0 * std::numeric_limits<double>::epsilon() * upper) break;

    // Secant through (lower, f(lower)) and (upper, f(upper)) stays in U by convexity.
    const double width = upper - lower;
    const double drop = f_upper - f_lower;  // <= 0, f is decreasing
    const double denom = width - drop;
    if (!(denom > 0.0)) break;
    const double next = (f_lower * width - lower * drop) / denom;
    if (!(next < upper)) break;  // stalled at round-off
    upper = std::max(next, lower);
    f_upper = f(upper);
  }

  out.iterations = it;
  const double candidates[] = {upper, lower};
  out.b = upper;
  out.residual = std::abs(f(upper) - upper);
  for (double c : candidates) {
    const double r = std::abs(f(c) - c);
    if (r < out.residual) {
      out.b = c;
      out.residual = r;
    }
  }
  if (out.residual > tolerance_for(out.b)) {
    out.used_bisection = true;
    out.b = bisect(f, 0.0, f.at_zero(), out.iterations);
    out.residual = std::abs(f(out.b) - out.b);
  }
  if (out.residual > tolerance_for(out.b)) {
    throw NoConvergence("fixed point for dB did not converge (residual " +
                        std::to_string(out.residual) + ")");
  }
  return out;
}

double tracking_objective(const Vector& pi, const Vector& nu_hat, const CovMatrix& kappa,
                          const CovMatrix& dC) {
  const Vector diff = pi - nu_hat;
  const double bias = dC.quadratic_form(diff);
  const Vector v = dC.matrix() * pi;
  return 0.25 * bias * bias + kappa.quadratic_form(v);
}

ShrinkResult shrink_portfolio(const Vector& nu_hat, const CovMatrix& kappa, const CovMatrix& dC) {
  if (nu_hat.size() != dC.dim() || kappa.dim() != dC.dim()) {
    throw DimensionMismatch("shrink_portfolio: dimension mismatch");
  }
  if (!dC.is_positive_definite()) throw SingularC("dC must be positive definite");

  const CovMatrix root = mat_sqrt(dC);
  const Matrix& S = root.matrix();
  const CovMatrix h(S * kappa.matrix() * S, kappa.max_eigenvalue() * dC.max_eigenvalue());
  const Vector z = S * nu_hat;

  ShrinkResult out;
  const FixedPointSolution sol = solve_b(h, z);
  out.b = sol.b;
  out.iterations = sol.iterations;
  out.residual = sol.residual;
  out.degenerate = sol.degenerate;

  if (sol.degenerate) {
    out.rho = nu_hat;
  } else {
    // y = (id + h / b)^{-1} z in the eigenbasis of h, then rho = dC^{-1/2} y.
    const Matrix& V = h.eigenvectors();
    const Vector coeffs = V.transpose() * z;
    Vector scaled(coeffs.size());
    for (Eigen::Index i = 0; i < coeffs.size(); ++i) {
      scaled(i) = coeffs(i) * sol.b / (sol.b + h.eigenvalues()(i));
    }
    const Vector y = V * scaled;
    out.rho = root.solve(y);
  }
  out.e_sq = tracking_objective(out.rho, nu_hat, kappa, dC);

  // Uniform problem: minimise (dF/dV)^2 (1-a)^4 + a^2.
  const double dF = 0.5 * dC.quadratic_form(nu_hat);
  const double dV_sq = kappa.quadratic_form(dC.matrix() * nu_hat);
  if (dF == 0.0) {
    out.psi = 0.0;  // nu_hat = 0: every uniform factor gives rho = 0
    out.a = 0.0;
  } else if (dV_sq == 0.0) {
    out.psi = std::numeric_limits<double>::infinity();
    out.a = 1.0;
  } else {
    out.psi = 13.5 * dF * dF / dV_sq;
    out.a = cardano_a(out.psi);
  }
  out.uniform_e_sq = tracking_objective(out.a * nu_hat, nu_hat, kappa, dC);
  out.uniform = (out.rho - out.a * nu_hat).norm() <= 1e-10 * std::max(1.0, nu_hat.norm());
  return out;
}

// With s = asinh(sqrt(psi)) = log(sqrt(1+psi) + sqrt(psi)), the closed form reads
// a = 1 - 3 / (1 + 2 cosh(2s/3)) = 4 sinh^2(s/3) / (1 + 2 cosh(2s/3)).
double cardano_a(double psi) {
  if (std::isnan(psi) || psi < 0.0) throw Error("cardano_a: psi must be nonnegative");
  if (std::isinf(psi)) return 1.0;
  const double s = std::asinh(std::sqrt(psi));
  const double sh = std::sinh(s / 3.0);
  return 4.0 * sh * sh / (1.0 + 2.0 * std::cosh(2.0 * s / 3.0));
}

double cardano_one_minus_a(double psi) {
  if (std::isnan(psi) || psi < 0.0) throw Error("cardano_one_minus_a: psi must be nonnegative");
  if (std::isinf(psi)) return 0.0;
  const double s = std::asinh(std::sqrt(psi));
  return 3.0 / (1.0 + 2.0 * std::cosh(2.0 * s / 3.0));
}

double psi_one_fund(double nu_hat, double kappa) {
  if (!(kappa > 0.0)) throw Error("psi_one_fund: kappa must be positive");
  return 27.0 / 8.0 * nu_hat * nu_hat / kappa;
}

double psi_constant_cov(const Vector& R, const CovMatrix& C) {
  if (R.size() != C.dim()) throw DimensionMismatch("R and C sizes differ");
  return 27.0 / 8.0 * R.dot(C.solve(R));
}

}  // namespace fundgrowth
