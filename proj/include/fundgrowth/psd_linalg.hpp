#pragma once

#include <Eigen/Dense>

namespace fundgrowth {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric positive-semidefinite matrix with a cached eigendecomposition.
///
/// Input is symmetrised as (m + m^T)/2. Eigenvalues are stored nonincreasing;
/// eigenvalues in [-1e-10 * lambda_max, 0) are treated as round-off and
/// clamped to zero, anything more negative is rejected.
class CovMatrix {
 public:
  static constexpr double kClampTolerance = 1e-10;

  CovMatrix() = default;
  explicit CovMatrix(const Matrix& m);
  /// As above, but negative dust is judged against max(lambda_max, reference_scale);
  /// use when m is a difference of matrices of that scale.
  CovMatrix(const Matrix& m, double reference_scale);

  static CovMatrix identity(Eigen::Index dim);
  static CovMatrix zero(Eigen::Index dim);
  static CovMatrix diagonal(const Vector& d);
  static CovMatrix scalar(double v) { return diagonal(Vector::Constant(1, v)); }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix& matrix() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  double max_eigenvalue() const { return dim() ? eigenvalues_(0) : 0.0; }
  double min_eigenvalue() const { return dim() ? eigenvalues_(dim() - 1) : 0.0; }
  double trace() const { return entries_.trace(); }

  /// Smallest eigenvalue exceeds `rel_tol` times the largest.
  bool is_positive_definite(double rel_tol = 1e-12) const;

  /// Inverse via the eigendecomposition; throws SingularC unless positive definite.
  Matrix inverse() const;
  /// Solves m x = b; throws SingularC unless positive definite.
  Vector solve(const Vector& b) const;
  double log_det() const;

  /// x^T m x
  double quadratic_form(const Vector& x) const { return x.dot(entries_ * x); }

  CovMatrix scaled(double s) const;
  friend CovMatrix operator+(const CovMatrix& a, const CovMatrix& b) {
    return CovMatrix(a.entries_ + b.entries_);
  }

 private:
  Matrix entries_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// Orthogonal projection matrix together with an orthonormal basis of its range.
class Projection {
 public:
  Projection() = default;
  /// Validates p*p = p and p^T = p to 1e-10.
  explicit Projection(const Matrix& p);

  static Projection identity(Eigen::Index dim);
  static Projection zero(Eigen::Index dim);

  Eigen::Index dim() const { return entries_.rows(); }
  Eigen::Index rank() const { return basis_.cols(); }
  const Matrix& matrix() const { return entries_; }
  /// dim x rank matrix with orthonormal columns spanning range(p).
  const Matrix& basis() const { return basis_; }

 private:
  Projection(Matrix entries, Matrix basis) : entries_(std::move(entries)), basis_(std::move(basis)) {}
  friend Projection projection_from_frame(const Matrix& f);

  Matrix entries_;
  Matrix basis_;
};

CovMatrix mat_sqrt(const CovMatrix& m);

/// Projection onto the column span of f, i.e. f (f^T f)^{-1} f^T.
/// Throws RankDeficient when the smallest singular value is <= 1e-10 of the largest.
Projection projection_from_frame(const Matrix& f);

/// Inverse of p c p seen as a map on range(p), extended by zero on ker(p).
/// Throws SingularOnSubspace when the restriction has an eigenvalue <= 1e-12 trace(c).
Matrix subspace_pinv(const CovMatrix& c, const Projection& p);

/// Smallest eigenvalue of c - c (pcp)^dagger c; nonnegative up to round-off.
double check_lemma_error_reduction(const CovMatrix& c, const Projection& p);

Matrix symmetrize(const Matrix& m);
double smallest_symmetric_eigenvalue(const Matrix& m);

}  // namespace fundgrowth
