#pragma once

#include <optional>

#include <Eigen/Dense>

#include "dpcp/dataset.hpp"
#include "dpcp/trace.hpp"

namespace dpcp {

/// Infinite-sample DPCP: inliers uniform on the sphere of S, outliers uniform
/// on S^{D-1}, a column being an outlier with probability p.
struct ContinuousProblem {
  ContinuousProblem(SubspaceModel subspace, double p);

  SubspaceModel subspace;
  double p;
  double c_d;
  double c_D;
};

/// p c_D + (1 - p) c_d cos(phi), cos(phi) = ||P_S b||.
double continuous_objective(const ContinuousProblem& problem, const Eigen::VectorXd& b);

/// Piecewise geometric steps for the continuous dynamics. Unset values are
/// derived from the problem and the initial vector: mu0 = 0.5 / (p c_D +
/// (1 - p) c_d), and K0 long enough for the constant phase to cancel the
/// S component, ceil(tan(theta0) |1 - mu0 p c_D| / (mu0 (1 - p) c_d)) + 10.
struct ContinuousSchedule {
  std::optional<double> mu0;
  double beta = 0.5;
  std::optional<int> K0;
  int K_star = 2;
};

struct ContinuousRun {
  Eigen::VectorXd b;
  Trace trace;  // angle column: principal angle from S-perp
  int iterations = 0;
  bool converged = false;
};

/// Iterates b <- normalize(b - mu (p c_D b + (1 - p) c_d s_hat)), s_hat the
/// normalized projection onto S (zero when that projection vanishes). Stops
/// when the step has become negligible (mu (p c_D + (1 - p) c_d) < 1e-17) or
/// after `max_iters` iterations beyond K0.
ContinuousRun continuous_psgm_run(const ContinuousProblem& problem, const Eigen::VectorXd& b0,
                                  const ContinuousSchedule& schedule = {}, int max_iters = 1000);

/// P_{S-perp}(b0) / ||P_{S-perp}(b0)||, the limit of the continuous dynamics.
Eigen::VectorXd continuous_fixed_point(const SubspaceModel& subspace, const Eigen::VectorXd& b0);

struct SpanCheck {
  Eigen::MatrixXd B_star;
  int rank = 0;
  bool spans_complement = false;
  double projection_distance = 0.0;
};

/// Maps every column of B0 to its continuous fixed point (closed form, or the
/// simulated limit when `simulate_with_p` gives an outlier probability), then reports the numerical rank
/// (singular values above 1e-8 sigma_1) and whether the span equals S-perp.
SpanCheck continuous_span_check(const SubspaceModel& subspace, const Eigen::MatrixXd& B0,
                                std::optional<double> simulate_with_p = std::nullopt, double tol = 1e-8);

}  // namespace dpcp
