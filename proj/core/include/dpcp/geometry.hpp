#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dpcp/dataset.hpp"
#include "dpcp/random.hpp"

namespace dpcp {

/// Average height of the unit hemisphere in R^k:
/// c_k = (k-2)!!/(k-1)!! times 2/pi for even k (1 for odd k).
double hemisphere_height(int k);

enum class ExtremalMode { Min, Max };

/// Probe-plus-refine settings for the sphere extremum estimators.
struct EstimatorOptions {
  int n_samples = 2000;
  int n_restarts = 8;
  double tol = 1e-10;
  int max_refine_iters = 500;
  Seed seed = 0;
};

/// A best-found value. Min estimates are upper bounds of the true infimum and
/// max estimates lower bounds of the supremum; `one_sided_bound` says which.
struct Estimate {
  double value = 0.0;
  std::string one_sided_bound;  // "upper" or "lower"
  int n_samples = 0;
  int n_restarts = 0;
  double achieved_tol = 0.0;
};

/// min or max over unit b of (1/n) ||P^T b||_1. When `restrict_basis` is
/// given (orthonormal D x d), b ranges over unit vectors of its span.
Estimate estimate_extremal_average(const Eigen::MatrixXd& points, const Eigen::MatrixXd* restrict_basis,
                                   ExtremalMode mode, const EstimatorOptions& options);

/// max over unit b of (1/n) ||(P - b b^T) points Sgn(points^T b)||_2, with
/// P = U U^T for `projector_basis` U, or the identity when it is null. With a
/// projector, b ranges over unit vectors of span(U) only; over the full
/// sphere the value tends to c_d instead of 0 for uniform inliers.
Estimate estimate_eta(const Eigen::MatrixXd& points, const Eigen::MatrixXd* projector_basis,
                      const EstimatorOptions& options);

struct EstimationMeta {
  int n_samples = 0;
  int n_restarts = 0;
  double achieved_tol = 0.0;
  Seed seed = 0;
  long long n_inliers = 0;
  long long n_outliers = 0;
  long long ambient_dim = 0;
  long long inlier_dim = 0;
  /// "estimated": min statistics are upper bounds, max statistics and etas lower bounds.
  std::string bounds = "analytic";
};

struct GeometryStats {
  double c_X_min = 0.0;
  double c_X_max = 0.0;
  double c_O_min = 0.0;
  double c_O_max = 0.0;
  double eta_X = 0.0;
  double eta_O = 0.0;
  double c_d = 0.0;
  double c_D = 0.0;
  EstimationMeta estimation_meta;
};

/// Estimates every statistic from labeled data and the ground-truth subspace.
/// eta_X is normalized by 1/N and eta_O by 1/M.
GeometryStats estimate_geometry_stats(const DataMatrix& matrix, const SubspaceModel& subspace,
                                      const EstimatorOptions& options);

/// Which constant the outlier averages tend to in the infinite-sample limit.
/// Uniform outliers give c_D; the recovery-condition discussion instead
/// sends c_O,max to c_d, which makes the condition's right-hand side vanish.
enum class OutlierLimit { AmbientHeight, InlierHeight };

/// Limits for N, M -> infinity with uniform inliers/outliers:
/// c_X = c_d, eta = 0 and c_O = c_D (or c_d, see OutlierLimit).
GeometryStats continuous_limit_stats(int D, int d, long long N = 0, long long M = 0,
                                     OutlierLimit outliers = OutlierLimit::AmbientHeight);

// --- theoretical conditions --------------------------------------------------

/// Piecewise geometrically diminishing step parameters. `mu0` holds one value
/// per instance, or a single value broadcast to every instance.
struct ScheduleParams {
  std::vector<double> mu0;
  double beta = 0.5;
  int K0 = 10;
  int K_star = 5;

  void validate() const;
  double mu0_for(std::size_t instance) const;
};

struct InitCheck {
  bool holds = false;
  double margin = 0.0;
};

/// theta0 < arctan(N c_X,min / (N eta_X + M eta_O)) and N c_X,min >= N eta_X + M eta_O.
InitCheck check_init_condition(double theta0, const GeometryStats& stats, double N, double M);

/// 1 / (4 max{N c_X,min, M c_O,max}).
double mu_prime(const GeometryStats& stats, double N, double M);

/// tan(theta0) / (mu (N c_X,min - max{1, tan theta0} (N eta_X + M eta_O))).
double k_diamond(double mu, double theta0, const GeometryStats& stats, double N, double M);

/// ((1 - mu0 M c_D) / (1 + mu0 (N (eta_X + c_X,max) + M (eta_O + c_O,max))))^K*.
double beta_upper_bound(double mu0, const GeometryStats& stats, double N, double M, int K_star);

struct KappaResult {
  double kappa = 0.0;
  std::vector<double> r_list;
};

KappaResult kappa_and_r(const ScheduleParams& schedule, const GeometryStats& stats, double N, double M,
                        std::size_t n_instances = 0);

struct TheoryConstants {
  double C1 = 1.0;
  double C2 = 0.5;
  double epsilon = 1.0;
};

struct TheoryReport {
  bool condition_holds = false;
  double margin = 0.0;
  std::optional<double> probability_lower_bound;
  double kappa = 0.0;
  std::vector<double> r_list;
  double delta_bound = 0.0;
  std::optional<double> mu_prime;
  std::optional<double> K_diamond;
  std::optional<double> beta_max;
  double lhs = 0.0;
  double rhs = 0.0;
  TheoryConstants constants;
  std::optional<bool> init_condition_holds;
  std::optional<double> init_margin;
  std::string note = "C1, C2 are heuristic defaults (absolute constants with no stated value)";
};

/// 1 - C1 sqrt(c'/D) - eps/sqrt(D) > sqrt(c') kappa (eta_O + c_O,max - c_d).
TheoryReport recovery_condition(int c_prime, int D, const GeometryStats& stats, double kappa,
                                const TheoryConstants& constants = {});

/// Everything at once: init condition, mu', K-diamond, beta bound, kappa and
/// the recovery inequality for the given schedule.
TheoryReport evaluate_theory(const GeometryStats& stats, double N, double M, int D, int c_prime, double theta0,
                             const ScheduleParams& schedule, const TheoryConstants& constants = {});

nlohmann::json to_json(const GeometryStats& stats);
GeometryStats geometry_stats_from_json(const nlohmann::json& j);
nlohmann::json to_json(const TheoryReport& report);
std::string to_key_value(const GeometryStats& stats);
std::string to_key_value(const TheoryReport& report);

}  // namespace dpcp
