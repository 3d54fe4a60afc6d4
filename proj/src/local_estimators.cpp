#include "fundgrowth/local_estimators.hpp"

#include <cmath>

#include "fundgrowth/errors.hpp"
#include "fundgrowth/market_sim.hpp"
#include "fundgrowth/random_instances.hpp"

namespace fundgrowth {
namespace {

void check_shapes(const Matrix& x, const Matrix& f, const CovMatrix& c) {
  if (x.rows() != c.dim() || f.rows() != c.dim() || x.cols() != f.cols()) {
    throw DimensionMismatch("x and f must both be I x K with I = dim(c)");
  }
}

Eigen::PartialPivLU<Matrix> factor_cross(const Matrix& cxf) {
  Eigen::JacobiSVD<Matrix> svd(cxf);
  const Vector& sv = svd.singularValues();
  if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-12 * sv(0))) {
    throw SingularCrossCovariance("dC_xf is singular");
  }
  return Eigen::PartialPivLU<Matrix>(cxf);
}

}  // namespace

Matrix cross_covariation(const Matrix& x, const Matrix& y, const CovMatrix& c, double dO) {
  return x.transpose() * c.matrix() * y * dO;
}

Vector estimate_theta(const LocalWindow& w, const Matrix& f) {
  check_shapes(w.combination, f, w.cov_rate);
  if (w.increments.rows() < 1 || w.increments.cols() != w.cov_rate.dim()) {
    throw DimensionMismatch("window needs at least one increment of dimension I");
  }
  const Matrix cxf = cross_covariation(w.combination, f, w.cov_rate, w.horizon());
  const Vector total = w.increments.colwise().sum().transpose();
  return factor_cross(cxf).solve(w.combination.transpose() * total);
}

double mse(const Matrix& x, const Matrix& f, const CovMatrix& c, double dO) {
  check_shapes(x, f, c);
  const auto lu = factor_cross(cross_covariation(x, f, c, dO));
  const Matrix cxx = cross_covariation(x, x, c, dO);
  // (dC_xf)^{-1} dC_xx (dC_xf)^{-T}
  const Matrix left = lu.solve(cxx);
  const Matrix full = lu.solve(left.transpose());
  return full.trace();
}

double dis(const Matrix& x, const Matrix& f, const CovMatrix& c, double dO) {
  check_shapes(x, f, c);
  const auto lu = factor_cross(cross_covariation(x, f, c, dO));
  const Matrix cxx = cross_covariation(x, x, c, dO);
  const Matrix root_ff = mat_sqrt(CovMatrix(cross_covariation(f, f, c, dO))).matrix();
  const Matrix inner = lu.solve(lu.solve(cxx).transpose());
  return 0.5 * (root_ff * inner * root_ff).trace();
}

double frobenius_objective(const CovMatrix& c, const Matrix& eta, const Matrix& f, const Matrix& x) {
  check_shapes(x, f, c);
  factor_cross(f.transpose() * c.matrix() * x);  // precondition only
  // With c^{1/2} f = q_f r_f and c^{1/2} x = q_x r_x the objective is ||(q_f^T q_x)^{-1} r_f^{-T} eta||^2,
  // invariant under x -> x g; q_f^T q_x holds the cosines of the principal angles.
  const Matrix root = mat_sqrt(c).matrix();
  const Eigen::Index k = f.cols();
  const Eigen::HouseholderQR<Matrix> qr_f(root * f);
  const Matrix r_f = qr_f.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Matrix y = r_f.transpose().triangularView<Eigen::Lower>().solve(eta);
  // K = I: both ranges are the whole space, so q_f^T q_x is orthogonal.
  if (k == f.rows()) return y.squaredNorm();
  const Matrix thin = Matrix::Identity(f.rows(), k);
  const Matrix q_f = qr_f.householderQ() * thin;
  const Matrix q_x = Eigen::HouseholderQR<Matrix>(root * x).householderQ() * thin;
  return (q_f.transpose() * q_x).partialPivLu().solve(y).squaredNorm();
}

MonteCarloEstimate mc_distance_from_growth(const Matrix& f, const CovMatrix& c, const Vector& theta,
                                           double dO, std::size_t n_windows, std::uint64_t seed,
                                           double noise_scale) {
  check_shapes(f, f, c);
  if (theta.size() != f.cols()) throw DimensionMismatch("theta must have K entries");
  if (n_windows < 2) throw Error("need at least two windows");
  const Vector nu = f * theta;
  const Vector drift = c.matrix() * nu * dO;
  const CovMatrix dC = c.scaled(dO);
  const IncrementSampler sampler(c.scaled(noise_scale * noise_scale));
  const auto lu = factor_cross(cross_covariation(f, f, c, dO));

  Rng rng(seed);
  Vector inc(c.dim());
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t n = 1; n <= n_windows; ++n) {
    sampler.sample_into(rng, drift, dO, inc);
    const Vector err = f * lu.solve(f.transpose() * inc) - nu;
    const double d = 0.5 * dC.quadratic_form(err);
    const double delta = d - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (d - mean);
  }
  const double n = static_cast<double>(n_windows);
  return MonteCarloEstimate{mean, std::sqrt(m2 / (n - 1.0) / n), n_windows};
}

}  // namespace fundgrowth
