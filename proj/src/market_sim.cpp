#include "fundgrowth/market_sim.hpp"

#include <boost/math/distributions/normal.hpp>
#include <algorithm>
#include <cmath>
#include <limits>

#include "fundgrowth/errors.hpp"

namespace fundgrowth {
namespace {

constexpr std::size_t kRejectionCap = 1'000'000;

// Inverse-CDF draw from N(mean, sd^2) restricted to (lo, hi).
double truncated_inverse_cdf(double mean, double sd, Interval iv, Rng& rng) {
  const boost::math::normal std_normal;
  double a = (iv.lo - mean) / sd;
  double b = (iv.hi - mean) / sd;
  // Work in the upper tail when the interval sits right of zero to keep precision.
  const bool reflect = a > 0.0;
  if (reflect) {
    std::swap(a, b);
    a = -a;
    b = -b;
  }
  const double pa = std::isinf(a) ? 0.0 : boost::math::cdf(std_normal, a);
  const double pb = std::isinf(b) ? 1.0 : boost::math::cdf(std_normal, b);
  if (!(pb > pa)) throw BadTruncation("truncation interval has no probability mass");
  double u = uniform(rng, pa, pb);
  u = std::clamp(u, std::nextafter(pa, 1.0), std::nextafter(pb, 0.0));
  double x = boost::math::quantile(std_normal, u);
  if (reflect) x = -x;
  return mean + sd * x;
}

Matrix root_of(const CovMatrix& c) {
  return c.dim() == 0 ? Matrix() : mat_sqrt(c).matrix();
}

}  // namespace

void PriorSpec::validate() const {
  if (cov.dim() != mean.size()) throw DimensionMismatch("prior mean and covariance sizes differ");
  if (truncation) {
    if (mean.size() != 1) throw BadTruncation("truncated prior requires a single asset");
    if (!(truncation->lo < truncation->hi)) throw BadTruncation("truncation requires lo < hi");
  }
}

Vector draw_prior(const PriorSpec& spec, std::uint64_t seed) {
  Rng rng(seed);
  return draw_prior(spec, rng);
}

Vector draw_prior(const PriorSpec& spec, Rng& rng) {
  spec.validate();
  const Matrix root = root_of(spec.cov);
  if (!spec.truncation) return spec.mean + root * random_normal_vector(spec.mean.size(), rng);

  const Interval iv = *spec.truncation;
  const double mean = spec.mean(0);
  const double sd = root(0, 0);
  if (sd == 0.0) {
    if (!iv.contains(mean)) throw BadTruncation("degenerate prior outside truncation interval");
    return spec.mean;
  }
  for (std::size_t attempt = 0; attempt < kRejectionCap; ++attempt) {
    const double x = mean + sd * standard_normal(rng);
    if (iv.contains(x)) return Vector::Constant(1, x);
  }
  return Vector::Constant(1, truncated_inverse_cdf(mean, sd, iv, rng));
}

IncrementSampler::IncrementSampler(const CovMatrix& c) : root_(root_of(c)), xi_(c.dim()) {}

Vector IncrementSampler::sample(Rng& rng, const Vector& drift, double dO) const {
  Vector out(dim());
  sample_into(rng, drift, dO, out);
  return out;
}

void IncrementSampler::sample_into(Rng& rng, const Vector& drift, double dO,
                                   Eigen::Ref<Vector> out) const {
  for (Eigen::Index i = 0; i < xi_.size(); ++i) xi_(i) = standard_normal(rng);
  out.noalias() = drift + std::sqrt(dO) * (root_ * xi_);
}

std::vector<double> uniform_clock(double start, double step, std::size_t steps) {
  std::vector<double> grid(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) grid[k] = start + step * static_cast<double>(k);
  return grid;
}

MarketPath simulate_path(const Vector& nu, const CovMatrix& c, std::span<const double> clock,
                         std::uint64_t seed) {
  if (clock.size() < 2) throw EmptyGrid("clock needs at least one step");
  if (nu.size() != c.dim()) throw DimensionMismatch("nu and covariance sizes differ");
  if (!c.is_positive_definite()) throw SingularC("covariance rate must be full rank");

  const auto steps = static_cast<Eigen::Index>(clock.size() - 1);
  MarketPath path{std::vector<double>(clock.begin(), clock.end()), Matrix(steps, nu.size()), nu, c,
                  seed};
  const IncrementSampler sampler(c);
  const Vector drift_rate = c.matrix() * nu;
  Rng rng(seed);
  Vector row(nu.size());
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double dO = clock[k + 1] - clock[k];
    if (!(dO > 0.0)) throw Error("clock must be strictly increasing");
    sampler.sample_into(rng, drift_rate * dO, dO, row);
    path.increments.row(k) = row.transpose();
  }
  return path;
}

double quadratic_variation_error(const MarketPath& path) {
  const Matrix realized = path.increments.transpose() * path.increments;
  const Matrix expected = path.cov_rate.matrix() * path.elapsed();
  return (realized - expected).norm() / expected.norm();
}

Matrix FundSpec::residual_operator() const {
  return Matrix::Identity(assets, assets) - beta * f.transpose();
}

FundSpec build_fund_model(const CovMatrix& c, const Matrix& f) {
  if (f.rows() != c.dim()) throw DimensionMismatch("fund loadings must have one row per asset");
  projection_from_frame(f);  // rank check
  const CovMatrix cff(f.transpose() * c.matrix() * f);
  if (!cff.is_positive_definite(1e-12)) throw RankDeficient("f^T c f is singular");

  FundSpec spec;
  spec.assets = f.rows();
  spec.funds = f.cols();
  spec.f = f;
  spec.cov_rate = c;
  const Matrix cf = c.matrix() * f;
  spec.beta = cf * cff.inverse();
  spec.residual_cov = CovMatrix(c.matrix() - cf * cff.inverse() * cf.transpose(), c.max_eigenvalue());
  return spec;
}

MarketPath simulate_fund_path(const FundSpec& spec, const Vector& theta,
                              std::span<const double> clock, std::uint64_t seed) {
  if (clock.size() < 2) throw EmptyGrid("clock needs at least one step");
  if (theta.size() != spec.funds) throw DimensionMismatch("theta must have one entry per fund");
  const CovMatrix cff(spec.f.transpose() * spec.cov_rate.matrix() * spec.f);
  const IncrementSampler fund_sampler(cff);
  const IncrementSampler residual_sampler(spec.residual_cov);
  const Vector fund_drift_rate = cff.matrix() * theta;
  const Vector zero = Vector::Zero(spec.assets);

  const auto steps = static_cast<Eigen::Index>(clock.size() - 1);
  MarketPath path{std::vector<double>(clock.begin(), clock.end()), Matrix(steps, spec.assets),
                  spec.f * theta, spec.cov_rate, seed};
  Rng rng(seed);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const double dO = clock[k + 1] - clock[k];
    if (!(dO > 0.0)) throw Error("clock must be strictly increasing");
    const Vector fund_inc = fund_sampler.sample(rng, fund_drift_rate * dO, dO);
    const Vector residual = residual_sampler.sample(rng, zero, dO);
    path.increments.row(k) = (spec.beta * fund_inc + residual).transpose();
  }
  return path;
}

Vector ResidualDriftEstimate::z_scores() const {
  Vector z(drift.size());
  for (Eigen::Index i = 0; i < drift.size(); ++i) {
    if (std_error(i) > 0.0) {
      z(i) = drift(i) / std_error(i);
    } else {
      z(i) = std::abs(drift(i)) <= 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
    }
  }
  return z;
}

double ResidualDriftEstimate::max_abs_z() const {
  return drift.size() == 0 ? 0.0 : z_scores().cwiseAbs().maxCoeff();
}

ResidualDriftEstimate residual_drift_check(const FundSpec& spec, const Vector& theta,
                                           std::size_t n_paths, std::uint64_t seed, double dO) {
  if (theta.size() != spec.funds) throw DimensionMismatch("theta must have one entry per fund");
  return residual_drift_check_nu(spec, spec.f * theta, n_paths, seed, dO);
}

ResidualDriftEstimate residual_drift_check_nu(const FundSpec& spec, const Vector& nu,
                                              std::size_t n_paths, std::uint64_t seed, double dO) {
  if (nu.size() != spec.assets) throw DimensionMismatch("nu must have one entry per asset");
  if (n_paths < 2) throw Error("residual drift check needs at least two paths");
  const IncrementSampler sampler(spec.cov_rate);
  const Vector drift = spec.cov_rate.matrix() * nu * dO;
  const Matrix residual_op = spec.residual_operator();

  // Welford accumulation per asset.
  Vector mean = Vector::Zero(spec.assets);
  Vector m2 = Vector::Zero(spec.assets);
  Vector inc(spec.assets);
  Vector resid(spec.assets);
  Rng rng(seed);
  for (std::size_t n = 1; n <= n_paths; ++n) {
    sampler.sample_into(rng, drift, dO, inc);
    resid.noalias() = residual_op * inc;
    const Vector delta = resid - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta.cwiseProduct(resid - mean);
  }
  const double n = static_cast<double>(n_paths);
  ResidualDriftEstimate out;
  out.drift = mean;
  out.std_error = (m2 / (n - 1.0) / n).cwiseSqrt();
  out.paths = n_paths;
  return out;
}

}  // namespace fundgrowth
