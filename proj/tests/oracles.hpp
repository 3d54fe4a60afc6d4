#pragma once

// Reference computations used only by the tests. Each one is built from first principles
// (direct solves, quadrature, brute-force sampling) and shares no code path with the library.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix sym_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  return es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
         es.eigenvectors().transpose();
}

/// Moore-Penrose inverse by SVD with a relative singular-value cutoff.
inline Matrix pinv(const Matrix& m, double rel = 1e-10) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  Vector inv = Vector::Zero(s.size());
  const double cut = rel * (s.size() ? s(0) : 0.0);
  for (Eigen::Index i = 0; i < s.size(); ++i) inv(i) = s(i) > cut ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

/// Fixed point of b -> 1/2 ||(h + b)^{-1} h z||^2 by bisection on [0, ||z||^2 / 2].
inline double fixed_point_bisection(const Matrix& h, const Vector& z) {
  const Eigen::Index n = z.size();
  const Vector hz = h * z;
  auto g = [&](double b) {
    const Matrix shifted = h + b * Matrix::Identity(n, n);
    const Vector y = shifted.fullPivLu().solve(hz);
    return 0.5 * y.squaredNorm() - b;
  };
  double lo = 0.0, hi = 0.5 * z.squaredNorm();
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// 1/4 ((pi - nu)^T dC (pi - nu))^2 + pi^T dC kappa dC pi.
inline double tracking(const Vector& pi, const Vector& nu, const Matrix& kappa, const Matrix& dC) {
  const Vector d = pi - nu;
  const double q = d.dot(dC * d);
  const Vector v = dC * pi;
  return 0.25 * q * q + v.dot(kappa * v);
}

/// Coordinate descent with exact one-dimensional minimisation (the objective restricted to a
/// coordinate is a convex quartic), followed by damped Newton on the full gradient.
inline Vector minimise_tracking(const Vector& nu, const Matrix& kappa, const Matrix& dC,
                                std::uint64_t seed, int starts = 20) {
  const Eigen::Index n = nu.size();
  const Matrix q2 = dC * kappa * dC;
  auto grad = [&](const Vector& pi) {
    const Vector d = pi - nu;
    return Vector(d.dot(dC * d) * (dC * d) + 2.0 * q2 * pi);
  };
  auto hess = [&](const Vector& pi) {
    const Vector d = pi - nu;
    const Vector w = dC * d;
    return Matrix(d.dot(w) * dC + 2.0 * w * w.transpose() + 2.0 * q2);
  };
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector best = nu;
  double best_val = tracking(nu, nu, kappa, dC);
  for (int s = 0; s < starts; ++s) {
    Vector pi(n);
    if (s == 0) {
      pi = nu;
    } else if (s == 1) {
      pi.setZero();
    } else {
      for (Eigen::Index i = 0; i < n; ++i) pi(i) = nu(i) * (1.0 + normal(rng));
    }
    for (int sweep = 0; sweep < 10; ++sweep) {
      for (Eigen::Index i = 0; i < n; ++i) {
        // Minimise t -> J(pi + t e_i) by bisection on its monotone derivative.
        auto dJ = [&](double t) {
          Vector p = pi;
          p(i) += t;
          return grad(p)(i);
        };
        double lo = -1.0, hi = 1.0;
        const double scale = 1.0 + std::abs(pi(i)) + nu.cwiseAbs().maxCoeff();
        lo *= scale;
        hi *= scale;
        while (dJ(lo) > 0.0) lo *= 2.0;
        while (dJ(hi) < 0.0) hi *= 2.0;
        for (int k = 0; k < 60; ++k) {
          const double mid = 0.5 * (lo + hi);
          (dJ(mid) > 0.0 ? hi : lo) = mid;
        }
        pi(i) += 0.5 * (lo + hi);
      }
    }
    for (int it = 0; it < 100; ++it) {
      const Vector g = grad(pi);
      if (g.norm() <= 1e-15 * (1.0 + pi.norm())) break;
      const Vector step = hess(pi).ldlt().solve(g);
      double t = 1.0;
      const double f0 = tracking(pi, nu, kappa, dC);
      while (t > 1e-12 && tracking(pi - t * step, nu, kappa, dC) > f0) t *= 0.5;
      if (t <= 1e-12) break;
      pi -= t * step;
    }
    const double val = tracking(pi, nu, kappa, dC);
    if (val < best_val) {
      best_val = val;
      best = pi;
    }
  }
  return best;
}

/// Root of -(8 psi / 27)(1 - a)^3 + 2a on [0, 1] by bisection.
inline double cubic_root(double psi) {
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = -(8.0 * psi / 27.0) * std::pow(1.0 - mid, 3) + 2.0 * mid;
    (g > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

struct Moments {
  double mean;
  double var;
};

/// Mean and variance of the density proportional to exp(nu R - C nu^2 / 2) on (l, r),
/// by adaptive Gauss-Kronrod quadrature in standardised units.
inline Moments truncated_moments(double R, double C, double l, double r) {
  const double sd = 1.0 / std::sqrt(C);
  const double centre = R / C;
  const double lb = std::isfinite(l) ? (l - centre) / sd : -std::numeric_limits<double>::infinity();
  const double rb = std::isfinite(r) ? (r - centre) / sd : std::numeric_limits<double>::infinity();
  // Peak of the density on the interval; everything is scaled by its value there.
  const double peak = std::clamp(0.0, lb, rb);
  const double lo = std::max(lb, peak - 40.0);
  const double hi = std::min(rb, peak + 40.0);
  auto w = [&](double u) { return std::exp(-0.5 * (u * u - peak * peak)); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  // Split into unit pieces so the integrand is resolved near the peak.
  std::vector<double> cuts{lo};
  const int pieces = std::max(1, static_cast<int>(std::ceil(hi - lo)));
  for (int k = 1; k < pieces; ++k) cuts.push_back(lo + (hi - lo) * k / pieces);
  cuts.push_back(hi);
  auto integrate = [&](auto fn) {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) total += GK::integrate(fn, cuts[k], cuts[k + 1], 15, 1e-15);
    return total;
  };
  const double z = integrate(w);
  const double m1 = integrate([&](double u) { return u * w(u); }) / z;
  const double m2 = integrate([&](double u) { return (u - m1) * (u - m1) * w(u); }) / z;
  return {centre + m1 * sd, m2 * sd * sd};
}

struct Weighted {
  Vector mean;
  Matrix cov;
  Vector mean_se;
  Matrix cov_se;
};

/// Posterior moments from prior draws x ~ N(nu0, kappa0) weighted by exp(x^T dR - x^T dC x / 2).
/// Standard errors from the delta method for self-normalised importance sampling.
inline Weighted importance_posterior(const Vector& nu0, const Matrix& kappa0, const Vector& dR,
                                     const Matrix& dC, std::size_t draws, std::uint64_t seed) {
  const Eigen::Index n = nu0.size();
  const Matrix L = kappa0.llt().matrixL();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Matrix xs(n, static_cast<Eigen::Index>(draws));
  Vector logw(static_cast<Eigen::Index>(draws));
  Vector xi(n);
  for (std::size_t k = 0; k < draws; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(rng);
    const Vector x = nu0 + L * xi;
    xs.col(static_cast<Eigen::Index>(k)) = x;
    logw(static_cast<Eigen::Index>(k)) = x.dot(dR) - 0.5 * x.dot(dC * x);
  }
  const Vector w = (logw.array() - logw.maxCoeff()).exp().matrix();
  const double sw = w.sum();
  Weighted out;
  out.mean = xs * w / sw;
  out.cov = Matrix::Zero(n, n);
  out.mean_se = Vector::Zero(n);
  out.cov_se = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < draws; ++k) {
    const Vector d = xs.col(static_cast<Eigen::Index>(k)) - out.mean;
    out.cov += w(static_cast<Eigen::Index>(k)) * d * d.transpose();
  }
  out.cov /= sw;
  for (std::size_t k = 0; k < draws; ++k) {
    const double wk = w(static_cast<Eigen::Index>(k)) / sw;
    const Vector d = xs.col(static_cast<Eigen::Index>(k)) - out.mean;
    const Matrix g = d * d.transpose() - out.cov;
    out.mean_se += (wk * wk) * d.cwiseProduct(d);
    out.cov_se += (wk * wk) * g.cwiseProduct(g);
  }
  out.mean_se = out.mean_se.cwiseSqrt();
  out.cov_se = out.cov_se.cwiseSqrt();
  return out;
}

struct McMean {
  double mean;
  double se;
};

/// E[1/2 nu^T dC nu] - 1/2 nu_hat^T dC nu_hat for nu ~ N(nu_hat, kappa).
inline McMean growth_loss_mc(const Vector& nu_hat, const Matrix& kappa, const Matrix& dC,
                             std::size_t draws, std::uint64_t seed) {
  const Eigen::Index n = nu_hat.size();
  const Matrix L = kappa.llt().matrixL();
  const double dF = 0.5 * nu_hat.dot(dC * nu_hat);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector xi(n), nu(n);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t k = 0; k < draws; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(rng);
    nu.noalias() = nu_hat + L * xi;
    const double v = 0.5 * nu.dot(dC * nu) - dF;
    sum += v;
    sum_sq += v * v;
  }
  const double m = sum / static_cast<double>(draws);
  const double var = (sum_sq / static_cast<double>(draws) - m * m) * draws / (draws - 1.0);
  return {m, std::sqrt(var / static_cast<double>(draws))};
}

}  // namespace oracle
