#include <gtest/gtest.h>

#include <cmath>

#include "fundgrowth/errors.hpp"
#include "fundgrowth/market_sim.hpp"

using namespace fundgrowth;

TEST(DrawPrior, DegenerateAndDeterministic) {
  const PriorSpec point{Vector::Constant(1, 0.5), CovMatrix::zero(1), std::nullopt};
  for (std::uint64_t s = 0; s < 5; ++s) EXPECT_EQ(draw_prior(point, s)(0), 0.5);
  const PriorSpec spec{Vector::Constant(2, 0.1), CovMatrix::identity(2), std::nullopt};
  EXPECT_EQ(draw_prior(spec, 42), draw_prior(spec, 42));
}

TEST(DrawPrior, SampleMeanWithinClt) {
  const PriorSpec spec{Vector::Constant(1, 0.3), CovMatrix::scalar(0.04), std::nullopt};
  Rng rng(11);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += draw_prior(spec, rng)(0);
  EXPECT_LE(std::abs(sum / n - 0.3), 3.0 * 0.2 / std::sqrt(static_cast<double>(n)));
}

TEST(DrawPrior, TruncatedDrawsStayInside) {
  const PriorSpec near{Vector::Constant(1, 0.0), CovMatrix::scalar(1.0), Interval{0.5, 1.0}};
  const PriorSpec far{Vector::Constant(1, 0.0), CovMatrix::scalar(1.0), Interval{9.0, 9.5}};
  Rng rng(12);
  for (int k = 0; k < 1000; ++k) EXPECT_TRUE(near.truncation->contains(draw_prior(near, rng)(0)));
  for (int k = 0; k < 3; ++k) EXPECT_TRUE(far.truncation->contains(draw_prior(far, rng)(0)));
}

TEST(DrawPrior, TruncationValidation) {
  const PriorSpec two_d{Vector::Zero(2), CovMatrix::identity(2), Interval{0.0, 1.0}};
  EXPECT_THROW(draw_prior(two_d, 1), BadTruncation);
  const PriorSpec reversed{Vector::Zero(1), CovMatrix::identity(1), Interval{1.0, 0.0}};
  EXPECT_THROW(draw_prior(reversed, 1), BadTruncation);
}

TEST(SimulatePath, ShapeDeterminismAndErrors) {
  const auto clock = uniform_clock(0.0, 0.01, 100);
  const Vector nu = Vector::Constant(2, 0.5);
  const CovMatrix c = CovMatrix::identity(2);
  const MarketPath a = simulate_path(nu, c, clock, 5);
  const MarketPath b = simulate_path(nu, c, clock, 5);
  EXPECT_EQ(a.steps(), 100);
  EXPECT_EQ(a.times.size(), 101u);
  EXPECT_EQ(a.increments, b.increments);
  const std::vector<double> single{0.0};
  EXPECT_THROW(simulate_path(nu, c, single, 1), EmptyGrid);
  EXPECT_THROW(simulate_path(nu, CovMatrix::zero(2), clock, 1), SingularC);
}

TEST(SimulatePath, QuadraticVariationWithinTolerance) {
  Rng rng(13);
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CovMatrix c = random_spd(3, rng);
    const std::size_t n = 2000;
    const MarketPath path = simulate_path(random_normal_vector(3, rng), c, uniform_clock(1.0, 1.0 / 252, n), s);
    EXPECT_LE(quadratic_variation_error(path), 5.0 / std::sqrt(static_cast<double>(n)));
  }
}

TEST(SimulatePath, MeanDriftMatchesCovTimesNu) {
  const Matrix cm = (Matrix(2, 2) << 1.0, 0.3, 0.3, 0.5).finished();
  const CovMatrix c(cm);
  const Vector nu = (Vector(2) << 0.8, -0.4).finished();
  const double dO = 0.5;
  const int paths = 20000;
  Vector sum = Vector::Zero(2);
  for (int k = 0; k < paths; ++k) {
    sum += simulate_path(nu, c, uniform_clock(0.0, dO, 1), static_cast<std::uint64_t>(k)).increments.row(0).transpose();
  }
  const Vector expected = cm * nu * dO;
  for (int i = 0; i < 2; ++i) {
    EXPECT_LE(std::abs(sum(i) / paths - expected(i)), 4.0 * std::sqrt(cm(i, i) * dO / paths));
  }
}

TEST(FundModel, OrthogonalityIdentities) {
  Rng rng(14);
  for (int k = 0; k < 50; ++k) {
    const CovMatrix c = random_spd(5, rng);
    const Matrix f = random_normal_matrix(5, 2, rng);
    const FundSpec spec = build_fund_model(c, f);
    const Matrix cff = f.transpose() * c.matrix() * f;
    EXPECT_LT((spec.beta * cff - c.matrix() * f).norm(), 1e-9 * (c.matrix() * f).norm());
    EXPECT_LT((spec.residual_cov.matrix() * f).norm(), 1e-9 * f.norm() * c.max_eigenvalue());
  }
  Matrix dependent(3, 2);
  dependent << 1, 2, 0, 0, 1, 2;
  EXPECT_THROW(build_fund_model(CovMatrix::identity(3), dependent), RankDeficient);
}

TEST(FundModel, ResidualDriftZeroInSpanAndDetectedOutside) {
  Rng rng(15);
  const CovMatrix c = random_spd(4, rng);
  const FundSpec spec = build_fund_model(c, random_normal_matrix(4, 2, rng));
  const Vector theta = (Vector(2) << 0.5, -0.2).finished();
  EXPECT_TRUE(residual_drift_check(spec, theta, 20000, 99).all_within(4.0));
  // Out of span: add a c-orthogonal component of unit length.
  Vector v = random_normal_vector(4, rng);
  const Matrix cf = c.matrix() * spec.f;
  v -= spec.f * (cf.transpose() * spec.f).ldlt().solve(cf.transpose() * v);
  v.normalize();
  EXPECT_FALSE(residual_drift_check_nu(spec, spec.f * theta + v, 20000, 99).all_within(4.0));
}

TEST(FundModel, SimulatedFundPathHasFullCovariance) {
  Rng rng(16);
  const CovMatrix c = random_spd(3, rng);
  const FundSpec spec = build_fund_model(c, random_normal_matrix(3, 1, rng));
  const std::size_t n = 4000;
  const MarketPath path = simulate_fund_path(spec, Vector::Constant(1, 0.3), uniform_clock(0.0, 1.0 / 252, n), 3);
  EXPECT_LE(quadratic_variation_error(path), 5.0 / std::sqrt(static_cast<double>(n)));
}
