#include "fundgrowth/random_instances.hpp"

#include <cmath>

namespace fundgrowth {

double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double uniform(Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  std::uniform_int_distribution<int> dist(lo, hi);
  return dist(rng);
}

Vector random_normal_vector(Eigen::Index n, Rng& rng) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = standard_normal(rng);
  return v;
}

Matrix random_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
  return m;
}

Matrix random_orthogonal(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_normal_matrix(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

CovMatrix random_psd(Eigen::Index n, Eigen::Index rank, Rng& rng, double lo, double hi) {
  const Matrix q = random_orthogonal(n, rng);
  Vector spectrum = Vector::Zero(n);
  for (Eigen::Index i = 0; i < rank; ++i) {
    spectrum(i) = std::exp(uniform(rng, std::log(lo), std::log(hi)));
  }
  return CovMatrix(q * spectrum.asDiagonal() * q.transpose());
}

CovMatrix random_spd(Eigen::Index n, Rng& rng, double lo, double hi) {
  return random_psd(n, n, rng, lo, hi);
}

Projection random_projection(Eigen::Index n, Eigen::Index k, Rng& rng) {
  if (k == 0) return Projection::zero(n);
  return projection_from_frame(random_normal_matrix(n, k, rng));
}

}  // namespace fundgrowth
