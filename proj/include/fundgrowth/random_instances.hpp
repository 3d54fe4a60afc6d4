#pragma once

#include <cstdint>
#include <random>

#include "fundgrowth/psd_linalg.hpp"

namespace fundgrowth {

using Rng = std::mt19937_64;

/// Seed for task `index` derived from a base seed by a fixed counter offset.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) { return base + index; }

double standard_normal(Rng& rng);
double uniform(Rng& rng, double lo, double hi);
int uniform_int(Rng& rng, int lo, int hi);

Vector random_normal_vector(Eigen::Index n, Rng& rng);
Matrix random_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix random_orthogonal(Eigen::Index n, Rng& rng);
/// Positive definite matrix with eigenvalues log-uniform in [lo, hi].
CovMatrix random_spd(Eigen::Index n, Rng& rng, double lo = 0.1, double hi = 2.0);
/// PSD matrix of the given rank, nonzero eigenvalues log-uniform in [lo, hi].
CovMatrix random_psd(Eigen::Index n, Eigen::Index rank, Rng& rng, double lo = 0.1, double hi = 2.0);
/// Orthogonal projection onto a uniformly random subspace of dimension k.
Projection random_projection(Eigen::Index n, Eigen::Index k, Rng& rng);

}  // namespace fundgrowth
