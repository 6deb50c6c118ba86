#include <cmath>

#include <gtest/gtest.h>

#include "dpcp/continuous.hpp"
#include "dpcp/geometry.hpp"
#include "test_util.hpp"

namespace dpcp {
namespace {

double angle_between_lines(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double c = std::abs(a.normalized().dot(b.normalized()));
  return std::acos(std::min(1.0, c));
}

TEST(ContinuousObjective, Examples) {
  const auto model = sample_haar_subspace(10, 7, 1);
  const ContinuousProblem problem(model, 0.4);
  EXPECT_DOUBLE_EQ(problem.c_d, hemisphere_height(7));
  EXPECT_DOUBLE_EQ(problem.c_D, hemisphere_height(10));
  EXPECT_NEAR(continuous_objective(problem, model.basis_sperp().col(1)), 0.4 * problem.c_D, 1e-15);
  EXPECT_NEAR(continuous_objective(problem, model.basis_s().col(0)), 0.4 * problem.c_D + 0.6 * problem.c_d, 1e-15);

  const ContinuousProblem all_outliers(model, 1.0);
  Rng rng(2);
  for (int i = 0; i < 5; ++i)
    EXPECT_NEAR(continuous_objective(all_outliers, rng.unit_vector(10)), all_outliers.c_D, 1e-15);
}

TEST(ContinuousObjective, MinimizedOnComplement) {
  const auto model = sample_haar_subspace(8, 5, 3);
  Rng rng(4);
  for (double p : {0.1, 0.5, 0.9, 1.0}) {
    const ContinuousProblem problem(model, p);
    for (int i = 0; i < 50; ++i) EXPECT_GE(continuous_objective(problem, rng.unit_vector(8)), p * problem.c_D - 1e-15);
  }
  EXPECT_DPCP_ERROR(ContinuousProblem(model, 1.5), ErrorKind::InvalidConfig);
}

TEST(ContinuousRun, AngleFollowsTangentDecrements) {
  const auto model = sample_haar_subspace(10, 7, 2);
  const ContinuousProblem problem(model, 0.5);
  Rng rng(3);
  const Eigen::VectorXd b0 = std::cos(1.0) * (model.basis_sperp() * rng.unit_vector(3)) +
                             std::sin(1.0) * (model.basis_s() * rng.unit_vector(7));
  const auto run = continuous_psgm_run(problem, b0);
  EXPECT_NEAR(run.trace.front().angle, 1.0, 1e-12);
  // Each step lowers tan(angle) by a fixed decrement, so the angle can only rise
  // when that decrement exceeds twice the current tangent and the iterate hops across S-perp.
  const double outlier_rate = 0.5 * problem.c_D;
  const double inlier_rate = 0.5 * problem.c_d;
  int overshoots = 0;
  for (std::size_t k = 1; k < run.trace.size(); ++k) {
    const double mu = run.trace[k].step;
    const double tan_prev = std::tan(run.trace[k - 1].angle);
    const double decrement = mu * inlier_rate / ((1.0 - mu * outlier_rate) * std::cos(run.trace[k - 1].angle));
    const double expected = std::atan(std::abs(tan_prev - decrement));
    EXPECT_NEAR(run.trace[k].angle, expected, 1e-12 + 1e-9 * expected) << "iteration " << k;
    if (decrement < 2.0 * tan_prev) {
      EXPECT_LT(run.trace[k].angle, run.trace[k - 1].angle) << "iteration " << k;
    } else {
      ++overshoots;
    }
  }
  EXPECT_GT(overshoots, 0);
  EXPECT_LT(run.trace.back().angle, 1e-8);
  EXPECT_TRUE(run.converged);
}

TEST(ContinuousRun, ComplementProjectionKeepsDirection) {
  const auto model = sample_haar_subspace(12, 8, 5);
  const ContinuousProblem problem(model, 0.3);
  Rng rng(6);
  const Eigen::VectorXd b0 = rng.unit_vector(12);
  const Eigen::VectorXd dir0 = (model.basis_sperp().transpose() * b0).normalized();
  const auto run = continuous_psgm_run(problem, b0);
  const Eigen::VectorXd dir = (model.basis_sperp().transpose() * run.b).normalized();
  EXPECT_LT((dir - dir0).norm(), 1e-12);
}

TEST(ContinuousRun, StartInComplementStays) {
  const auto model = sample_haar_subspace(6, 4, 1);
  const Eigen::VectorXd b0 = model.basis_sperp().col(0);
  const auto run = continuous_psgm_run(ContinuousProblem(model, 0.5), b0);
  EXPECT_LT((run.b - b0).norm(), 1e-15);
}

TEST(ContinuousRun, Errors) {
  const auto model = sample_haar_subspace(6, 4, 1);
  const ContinuousProblem problem(model, 0.5);
  EXPECT_DPCP_ERROR(continuous_psgm_run(problem, model.basis_s().col(0)), ErrorKind::MeasureZeroInitialization);
  ContinuousSchedule forbidden;
  forbidden.mu0 = 1.0 / (0.5 * problem.c_D);
  Rng rng(99);
  EXPECT_DPCP_ERROR(continuous_psgm_run(problem, rng.unit_vector(6), forbidden), ErrorKind::ForbiddenStep);
}

TEST(FixedPoint, Examples) {
  const auto model = sample_haar_subspace(20, 15, 4);
  const Eigen::VectorXd n0 = model.basis_sperp().col(2);
  EXPECT_LT((continuous_fixed_point(model, n0) - n0).norm(), 1e-15);

  Rng rng(2);
  const Eigen::VectorXd s = model.basis_s() * rng.normal_vector(15);
  const Eigen::VectorXd n = model.basis_sperp() * rng.normal_vector(5);
  EXPECT_LT((continuous_fixed_point(model, (s + n).normalized()) - n.normalized()).norm(), 1e-12);
  EXPECT_DPCP_ERROR(continuous_fixed_point(model, model.basis_s().col(0)), ErrorKind::MeasureZeroInitialization);
}

TEST(FixedPoint, SimulatedLimitMatchesClosedForm) {
  for (int t = 0; t < 100; ++t) {
    Rng rng(derive_seed(31, {static_cast<std::uint64_t>(t)}));
    const int D = 3 + static_cast<int>(rng.below(28));
    const int d = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(D - 1)));
    const double p = 0.05 + 0.9 * rng.uniform();
    const auto model = sample_haar_subspace(D, d, rng.below(1u << 30));
    const Eigen::VectorXd b0 = rng.unit_vector(D);
    const auto run = continuous_psgm_run(ContinuousProblem(model, p), b0);
    EXPECT_LT(angle_between_lines(run.b, continuous_fixed_point(model, b0)), 1e-6)
        << "D=" << D << " d=" << d << " p=" << p;
  }
}

TEST(SpanCheck, RankEqualsCodim) {
  const auto model = sample_haar_subspace(20, 15, 7);
  Rng rng(8);
  for (int cp : {5, 8}) {
    Eigen::MatrixXd B0(20, cp);
    for (int i = 0; i < cp; ++i) B0.col(i) = rng.unit_vector(20);
    const auto check = continuous_span_check(model, B0);
    EXPECT_EQ(check.rank, 5);
    EXPECT_TRUE(check.spans_complement);
    EXPECT_LT(check.projection_distance, 1e-8);
  }
}

TEST(SpanCheck, SimulatedMatchesClosedForm) {
  const auto model = sample_haar_subspace(15, 11, 1);
  Rng rng(2);
  Eigen::MatrixXd B0(15, 6);
  for (int i = 0; i < 6; ++i) B0.col(i) = rng.unit_vector(15);
  const auto sim = continuous_span_check(model, B0, 0.5);
  EXPECT_EQ(sim.rank, 4);
  EXPECT_TRUE(sim.spans_complement);
}

TEST(SpanCheck, DuplicateColumns) {
  const auto model = sample_haar_subspace(10, 7, 3);
  Rng rng(4);
  Eigen::MatrixXd B0(10, 5);
  for (int i = 0; i < 5; ++i) B0.col(i) = rng.unit_vector(10);
  B0.col(4) = B0.col(0);
  const auto check = continuous_span_check(model, B0);
  EXPECT_EQ(check.B_star.col(4), check.B_star.col(0));
  EXPECT_EQ(check.rank, 3);
  EXPECT_TRUE(check.spans_complement);
}

TEST(SpanCheck, TooFewColumnsRejected) {
  const auto model = sample_haar_subspace(10, 6, 3);
  Rng rng(4);
  Eigen::MatrixXd B0(10, 2);
  for (int i = 0; i < 2; ++i) B0.col(i) = rng.unit_vector(10);
  EXPECT_DPCP_ERROR(continuous_span_check(model, B0), ErrorKind::InvalidConfig);
}

TEST(SpanCheck, DegenerateColumnNamed) {
  const auto model = sample_haar_subspace(6, 3, 3);
  Eigen::MatrixXd B0(6, 3);
  B0 << model.basis_sperp().col(0), model.basis_s().col(1), model.basis_sperp().col(2);
  try {
    continuous_span_check(model, B0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MeasureZeroInitialization);
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos) << e.what();
  }
}

TEST(ContinuousObjective, MatchesMonteCarloAverage) {
  const auto model = sample_haar_subspace(6, 3, 5);
  const double p = 0.4;
  const ContinuousProblem problem(model, p);
  Rng rng(6);
  const Eigen::VectorXd b = rng.unit_vector(6);
  const int n = 400000;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd x = rng.uniform() < p ? rng.unit_vector(6) : Eigen::VectorXd(model.basis_s() * rng.unit_vector(3));
    total += std::abs(x.dot(b));
  }
  EXPECT_NEAR(total / n, continuous_objective(problem, b), 3e-3);
}

}  // namespace
}  // namespace dpcp
