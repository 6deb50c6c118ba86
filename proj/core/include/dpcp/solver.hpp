#pragma once

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "dpcp/dataset.hpp"
#include "dpcp/geometry.hpp"
#include "dpcp/random.hpp"
#include "dpcp/trace.hpp"

namespace dpcp {

enum class ScheduleKind { Constant, PiecewiseGeometric, Mbls };

/// Step-size policy shared by every instance of a solve.
///
/// `mu0` is the constant step, the initial step of the piecewise geometric
/// rule, or the first trial step of the line search. An empty list selects
/// the automatic initialization f(b0) / ||g(b0)||^2 per instance; a single
/// value is broadcast to every instance.
struct StepSchedule {
  ScheduleKind kind = ScheduleKind::PiecewiseGeometric;
  std::vector<double> mu0;

  // Piecewise geometric.
  double beta = 0.5;
  int K0 = 10;
  int K_star = 5;

  // Line search: accept when f(candidate) <= f - alpha * mu * ||g_T||^2.
  double alpha = 1e-3;
  double shrink = 0.5;
  double grow = 1.5;
  int max_backtracks = 50;

  static StepSchedule constant(double mu);
  static StepSchedule piecewise_geometric(const ScheduleParams& params);
  static StepSchedule mbls(std::vector<double> mu0 = {});

  void validate() const;
  /// Parameters in the form the theory evaluators take.
  ScheduleParams params() const;
};

/// Step at iteration k for an instance whose initial step is mu0. For the
/// line search this is the initial trial step only.
double step_size(const StepSchedule& schedule, double mu0, int k);

/// Arguments passed to SolverConfig::observer after every accepted step.
struct StepEvent {
  std::size_t instance;
  int iteration;
  const Eigen::VectorXd& b_hat;   // current iterate (unit norm)
  const Eigen::VectorXd& b_next;  // b_hat - mu * g before projection
  double mu;
  const Eigen::VectorXd& subgradient;
};

struct SolverConfig {
  int c_prime = 1;
  int max_iters = 2000;
  /// Stop when the angle between successive iterates falls below this (radians).
  double stop_tol = 1e-8;
  StepSchedule schedule;
  Seed seed = 0;
  bool sgn_zero_is_zero = true;
  /// Worker threads for independent instances; results do not depend on it.
  int workers = 1;
  /// When given, automatic initial steps are clipped to mu'.
  std::optional<GeometryStats> stats;
  /// When given (D x c orthonormal), traces record the angle from its span.
  std::optional<Eigen::MatrixXd> truth_complement;
  /// Called from the thread running the instance.
  std::function<void(const StepEvent&)> observer;

  void validate() const;
};

struct InstanceResult {
  Eigen::VectorXd b;
  Eigen::VectorXd b0;
  Trace trace;
  double mu0 = 0.0;
  int iterations = 0;
  bool converged = false;
  Seed seed = 0;
};

/// D x c' candidate normals, one column per instance, plus their traces.
struct DualBasis {
  Eigen::MatrixXd B;
  std::vector<InstanceResult> instances;
  Seed seed = 0;

  Eigen::Index ambient_dim() const { return B.rows(); }
  Eigen::Index n_instances() const { return B.cols(); }
  std::vector<Trace> traces() const;
};

/// sum_i ||X^T b_i||_1.
double objective(const DataMatrix& matrix, const Eigen::MatrixXd& B);
double objective(const Eigen::MatrixXd& points, const Eigen::VectorXd& b);

/// X Sgn(X^T b); Sgn(0) = 0 unless `sgn_zero_is_zero` is false (then +1).
Eigen::VectorXd subgradient(const DataMatrix& matrix, const Eigen::VectorXd& b, bool sgn_zero_is_zero = true);
Eigen::VectorXd subgradient(const Eigen::MatrixXd& points, const Eigen::VectorXd& b, bool sgn_zero_is_zero = true);

/// f(b0) / ||g(b0)||^2 (1 when g vanishes), clipped to mu' when stats are given.
double auto_initial_step(const Eigen::MatrixXd& points, const Eigen::VectorXd& b0,
                         const std::optional<GeometryStats>& stats = std::nullopt);

/// One projected subgradient instance from b0.
InstanceResult psgm_single(const DataMatrix& matrix, const Eigen::VectorXd& b0, const SolverConfig& config,
                           std::size_t instance = 0);

/// Initial vector of instance i: uniform on the sphere from derive_seed(seed, {i}).
Eigen::VectorXd instance_initial_vector(Eigen::Index D, Seed seed, std::size_t instance);

/// c' independent instances from seed-derived uniform initial vectors.
DualBasis psgm_multi(const DataMatrix& matrix, const SolverConfig& config);

/// Same, from explicit initial vectors (columns of B0).
DualBasis psgm_multi(const DataMatrix& matrix, const Eigen::MatrixXd& B0, const SolverConfig& config);

struct AverageTerms {
  Eigen::VectorXd x_avg;
  Eigen::VectorXd o_avg;
};

/// (1/N) sum Sgn(b^T x_j) x_j and (1/M) sum Sgn(b^T o_j) o_j; a side with no
/// columns yields the zero vector.
AverageTerms average_terms(const DataMatrix& matrix, const Eigen::VectorXd& b);

}  // namespace dpcp
