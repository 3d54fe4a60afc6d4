#pragma once

#include "fundgrowth/psd_linalg.hpp"

namespace fundgrowth {

/// f(b) = 1/2 ||(h + b id)^{-1} h z||^2 = 1/2 sum_i (s_i / (s_i + b))^2 (v_i^T z)^2,
/// strictly decreasing and convex on [0, inf) whenever h z != 0.
class GapFunction {
 public:
  GapFunction(const CovMatrix& h, const Vector& z);

  double operator()(double b) const;
  double derivative(double b) const;
  /// f(0), an upper bound for the fixed point.
  double at_zero() const { return (*this)(0.0); }

  const Vector& spectrum() const { return spectrum_; }
  /// (v_i^T z)^2
  const Vector& weights() const { return weights_; }

 private:
  Vector spectrum_;
  Vector weights_;
};

struct FixedPointSolution {
  double b = 0.0;
  int iterations = 0;
  double residual = 0.0;   ///< |f(b) - b|
  bool degenerate = false; ///< h z = 0, so b = 0 and no shrinkage
  bool used_bisection = false;
};

/// Solves f(b) = b on (0, ||z||^2/2). Iterates the convex secant update from the upper
/// side, tightening the lower side with the Newton step; falls back to bisection if the
/// bracket stalls. Throws NoConvergence if 200 iterations do not reach the residual
/// 1e-12 max(1, b).
FixedPointSolution solve_b(const CovMatrix& h, const Vector& z);

struct ShrinkResult {
  Vector rho;
  double b = 0.0;        ///< growth given up, 1/2 ||dC^{1/2}(rho - nu_hat)||^2
  double a = 1.0;        ///< best uniform factor from Cardano's formula
  bool uniform = false;  ///< rho equals a nu_hat to 1e-10
  double psi = 0.0;      ///< (27/2)(dF/dV)^2 of the uniform problem
  double e_sq = 0.0;     ///< tracking objective at rho
  double uniform_e_sq = 0.0;  ///< tracking objective at a nu_hat
  int iterations = 0;
  double residual = 0.0;
  bool degenerate = false;
};

/// (dE_pi)^2 = 1/4 ||dC^{1/2}(pi - nu_hat)||^4 + ||kappa^{1/2} dC pi||^2.
double tracking_objective(const Vector& pi, const Vector& nu_hat, const CovMatrix& kappa,
                          const CovMatrix& dC);

/// rho = (id + kappa dC / dB)^{-1} nu_hat minimising the tracking objective.
/// Requires dC positive definite (SingularC otherwise).
ShrinkResult shrink_portfolio(const Vector& nu_hat, const CovMatrix& kappa, const CovMatrix& dC);

/// Minimiser of (dF/dV)^2 (1 - a)^4 + a^2 with psi = (27/2)(dF/dV)^2. Returns 1 for psi = inf.
double cardano_a(double psi);
/// 1 - cardano_a(psi), without cancellation for large psi.
double cardano_one_minus_a(double psi);

/// (27/8) nu_hat^2 / kappa for a single fund.
double psi_one_fund(double nu_hat, double kappa);
/// (27/8) R^T C^{-1} R for constant covariance rate with a Bayesian prior. Throws SingularC.
double psi_constant_cov(const Vector& R, const CovMatrix& C);

}  // namespace fundgrowth
