#include "dpcp/continuous.hpp"

#include <cmath>

#include "dpcp/analysis.hpp"
#include "dpcp/error.hpp"
#include "dpcp/geometry.hpp"

namespace dpcp {

namespace {

constexpr double kZeroProjection = 1e-13;

void check_vector(const SubspaceModel& subspace, const Eigen::VectorXd& b) {
  if (b.size() != subspace.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "vector and subspace dimensions differ");
}

}  // namespace

ContinuousProblem::ContinuousProblem(SubspaceModel subspace_in, double p_in)
    : subspace(std::move(subspace_in)),
      p(p_in),
      c_d(hemisphere_height(static_cast<int>(subspace.inlier_dim()))),
      c_D(hemisphere_height(static_cast<int>(subspace.ambient_dim()))) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidConfig, "p must lie in [0, 1]");
}

double continuous_objective(const ContinuousProblem& problem, const Eigen::VectorXd& b) {
  check_vector(problem.subspace, b);
  const double cos_phi = (problem.subspace.basis_s().transpose() * b).norm();
  return problem.p * problem.c_D + (1.0 - problem.p) * problem.c_d * cos_phi;
}

ContinuousRun continuous_psgm_run(const ContinuousProblem& problem, const Eigen::VectorXd& b0,
                                  const ContinuousSchedule& schedule, int max_iters) {
  check_vector(problem.subspace, b0);
  const SubspaceModel& sub = problem.subspace;
  const double perp0 = sub.project_sperp(b0).norm();
  if (perp0 <= 1e-12)
    throw Error(ErrorKind::MeasureZeroInitialization, "initial vector lies in S; its complement projection is zero");
  if (!(schedule.beta > 0.0 && schedule.beta < 1.0) || schedule.K_star < 1)
    throw Error(ErrorKind::InvalidConfig, "need beta in (0, 1) and K* >= 1");

  const double outlier_rate = problem.p * problem.c_D;
  const double inlier_rate = (1.0 - problem.p) * problem.c_d;
  const double mu0 = schedule.mu0.value_or(0.5 / (outlier_rate + inlier_rate));
  if (!(mu0 > 0.0)) throw Error(ErrorKind::InvalidStep, "mu0 must be positive");
  int K0 = 10;
  if (schedule.K0) {
    K0 = *schedule.K0;
  } else if (inlier_rate > 0.0) {
    const double tan0 = sub.project_s(b0).norm() / perp0;
    K0 += static_cast<int>(std::ceil(tan0 * std::abs(1.0 - mu0 * outlier_rate) / (mu0 * inlier_rate)));
  }
  auto angle = [&](const Eigen::VectorXd& b) { return std::atan2(sub.project_s(b).norm(), sub.project_sperp(b).norm()); };

  ContinuousRun run;
  Eigen::VectorXd b = b0;
  run.trace.push_back({0, continuous_objective(problem, b), 0.0, angle(b), 0, false, {}});
  for (int k = 0; k < K0 + max_iters; ++k) {
    const double mu = k < K0 ? mu0 : mu0 * std::pow(schedule.beta, (k - K0) / schedule.K_star + 1);
    if (outlier_rate > 0.0 && mu == 1.0 / outlier_rate)
      throw Error(ErrorKind::ForbiddenStep, "step equals 1 / (p c_D)");
    if (mu * (outlier_rate + inlier_rate) < 1e-17) {
      run.converged = true;
      break;
    }
    const Eigen::VectorXd in_s = sub.project_s(b);
    const double s_norm = in_s.norm();
    Eigen::VectorXd next = (1.0 - mu * outlier_rate) * b;
    if (s_norm > kZeroProjection) next -= (mu * inlier_rate / s_norm) * in_s;
    const double n = next.norm();
    if (n == 0.0) throw Error(ErrorKind::DegenerateStep, "continuous step is the zero vector");
    next /= n;
    const bool still = next == b;
    b = std::move(next);
    run.iterations = k + 1;
    run.trace.push_back({k + 1, continuous_objective(problem, b), mu, angle(b), 0, false, {}});
    if (still) {
      run.converged = true;
      break;
    }
  }
  run.b = std::move(b);
  return run;
}

Eigen::VectorXd continuous_fixed_point(const SubspaceModel& subspace, const Eigen::VectorXd& b0) {
  check_vector(subspace, b0);
  const Eigen::VectorXd perp = subspace.project_sperp(b0);
  const double n = perp.norm();
  if (n <= 1e-12)
    throw Error(ErrorKind::MeasureZeroInitialization, "initial vector lies in S; its complement projection is zero");
  return perp / n;
}

SpanCheck continuous_span_check(const SubspaceModel& subspace, const Eigen::MatrixXd& B0,
                                std::optional<double> simulate_with_p, double tol) {
  if (B0.rows() != subspace.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "B0 and subspace dimensions differ");
  if (B0.cols() < subspace.codim()) throw Error(ErrorKind::InvalidConfig, "c' must be >= c");
  std::optional<ContinuousProblem> problem;
  if (simulate_with_p) problem.emplace(subspace, *simulate_with_p);

  SpanCheck out;
  out.B_star.resize(B0.rows(), B0.cols());
  for (Eigen::Index i = 0; i < B0.cols(); ++i) {
    try {
      out.B_star.col(i) = problem ? continuous_psgm_run(*problem, B0.col(i)).b : continuous_fixed_point(subspace, B0.col(i));
    } catch (const Error& e) {
      throw Error(e.kind(), "column " + std::to_string(i) + ": " + e.detail());
    }
  }
  const RankEstimate rank = estimate_rank(out.B_star, RankStrategy::threshold(1e-8));
  out.rank = rank.rank;
  out.projection_distance = projection_distance(orthonormal_column_space(out.B_star, rank.rank), subspace.basis_sperp());
  out.spans_complement = out.rank == subspace.codim() && out.projection_distance < tol;
  return out;
}

}  // namespace dpcp
