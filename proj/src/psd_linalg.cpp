#include "fundgrowth/psd_linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fundgrowth/errors.hpp"

namespace fundgrowth {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

double smallest_symmetric_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

CovMatrix::CovMatrix(const Matrix& m) : CovMatrix(m, 0.0) {}

CovMatrix::CovMatrix(const Matrix& m, double reference_scale) {
  if (m.rows() != m.cols()) {
    throw DimensionMismatch("CovMatrix requires a square matrix, got " + std::to_string(m.rows()) +
                            "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) throw NotPositiveSemidefinite("CovMatrix entries must be finite");
  entries_ = symmetrize(m);
  const Eigen::Index n = entries_.rows();
  if (n == 0) return;

  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_);
  // Eigen sorts increasing; store nonincreasing.
  eigenvalues_ = es.eigenvalues().reverse();
  eigenvectors_ = es.eigenvectors().rowwise().reverse();

  const double top = std::max({eigenvalues_(0), reference_scale, 0.0});
  const double floor = -kClampTolerance * top;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eigenvalues_(i) >= 0.0) continue;
    if (eigenvalues_(i) < floor) {
      throw NotPositiveSemidefinite("eigenvalue " + std::to_string(eigenvalues_(i)) +
                                    " below clamp threshold");
    }
    eigenvalues_(i) = 0.0;
  }
}

CovMatrix CovMatrix::identity(Eigen::Index dim) { return CovMatrix(Matrix::Identity(dim, dim)); }
CovMatrix CovMatrix::zero(Eigen::Index dim) { return CovMatrix(Matrix::Zero(dim, dim)); }
CovMatrix CovMatrix::diagonal(const Vector& d) { return CovMatrix(Matrix(d.asDiagonal())); }

bool CovMatrix::is_positive_definite(double rel_tol) const {
  if (dim() == 0) return false;
  return max_eigenvalue() > 0.0 && min_eigenvalue() > rel_tol * max_eigenvalue();
}

Matrix CovMatrix::inverse() const {
  if (!is_positive_definite()) throw SingularC("matrix is not positive definite");
  return eigenvectors_ * eigenvalues_.cwiseInverse().asDiagonal() * eigenvectors_.transpose();
}

Vector CovMatrix::solve(const Vector& b) const {
  if (b.size() != dim()) throw DimensionMismatch("solve: right-hand side has wrong size");
  if (!is_positive_definite()) throw SingularC("matrix is not positive definite");
  Vector coeffs = eigenvectors_.transpose() * b;
  return eigenvectors_ * coeffs.cwiseQuotient(eigenvalues_);
}

double CovMatrix::log_det() const {
  if (!is_positive_definite()) throw SingularC("log_det of a singular matrix");
  return eigenvalues_.array().log().sum();
}

CovMatrix CovMatrix::scaled(double s) const {
  if (s < 0.0) throw NotPositiveSemidefinite("negative scale factor");
  return CovMatrix(s * entries_);
}

CovMatrix mat_sqrt(const CovMatrix& m) {
  if (m.dim() == 0) return m;
  const Matrix& v = m.eigenvectors();
  return CovMatrix(v * m.eigenvalues().cwiseSqrt().asDiagonal() * v.transpose());
}

Projection::Projection(const Matrix& p) {
  if (p.rows() != p.cols()) throw DimensionMismatch("projection must be square");
  constexpr double tol = 1e-10;
  if ((p - p.transpose()).cwiseAbs().maxCoeff() > tol || (p * p - p).cwiseAbs().maxCoeff() > tol) {
    throw Error("matrix is not an orthogonal projection");
  }
  entries_ = symmetrize(p);
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_);
  const auto rank = static_cast<Eigen::Index>(std::lround(entries_.trace()));
  // Eigenvalues are ~0 or ~1; the top `rank` eigenvectors span the range.
  basis_ = es.eigenvectors().rightCols(rank);
}

Projection Projection::identity(Eigen::Index dim) {
  return Projection(Matrix::Identity(dim, dim), Matrix::Identity(dim, dim));
}

Projection Projection::zero(Eigen::Index dim) {
  return Projection(Matrix::Zero(dim, dim), Matrix(dim, 0));
}

Projection projection_from_frame(const Matrix& f) {
  if (f.cols() == 0 || f.rows() < f.cols()) throw RankDeficient("frame must have 1..dim columns");
  Eigen::JacobiSVD<Matrix> svd(f, Eigen::ComputeThinU);
  const Vector& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-10 * sv(0))) {
    throw RankDeficient("frame columns are numerically dependent");
  }
  Matrix u = svd.matrixU();
  Matrix p = symmetrize(u * u.transpose());
  return Projection(std::move(p), std::move(u));
}

Matrix subspace_pinv(const CovMatrix& c, const Projection& p) {
  if (c.dim() != p.dim()) throw DimensionMismatch("subspace_pinv: dimension mismatch");
  const Eigen::Index n = c.dim();
  if (p.rank() == 0) return Matrix::Zero(n, n);

  // Work in the basis of range(p) so the kernel of p never mixes into the spectrum.
  const Matrix& u = p.basis();
  const CovMatrix restricted(u.transpose() * c.matrix() * u);
  if (!(restricted.min_eigenvalue() > 1e-12 * c.trace())) {
    throw SingularOnSubspace("p c p is singular on range(p)");
  }
  const Matrix w = u * restricted.eigenvectors();
  return symmetrize(w * restricted.eigenvalues().cwiseInverse().asDiagonal() * w.transpose());
}

double check_lemma_error_reduction(const CovMatrix& c, const Projection& p) {
  if (c.dim() != p.dim()) throw DimensionMismatch("check_lemma_error_reduction: dimension mismatch");
  subspace_pinv(c, p);  // precondition only
  // c c_pp^dagger c = c^{1/2} q c^{1/2} with q the projection onto c^{1/2} range(p), so the
  // difference is m^T m for m = (id - q) c^{1/2}.
  const Matrix root = mat_sqrt(c).matrix();
  Matrix m = root;
  if (p.rank() > 0) {
    const Eigen::HouseholderQR<Matrix> qr(root * p.basis());
    const Matrix q = qr.householderQ() * Matrix::Identity(c.dim(), p.rank());
    m -= q * (q.transpose() * root);
  }
  return smallest_symmetric_eigenvalue(m.transpose() * m);
}

}  // namespace fundgrowth
