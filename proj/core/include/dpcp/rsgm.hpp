#pragma once

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dpcp/dataset.hpp"
#include "dpcp/trace.hpp"

namespace dpcp {

/// Piecewise geometric steps for the orthogonality-constrained baseline.
/// Without `mu0` the initial step is f(B0) / ||G_R(B0)||_F^2.
struct RsgmSchedule {
  std::optional<double> mu0;
  double beta = 0.5;
  int K0 = 30;
  int K_star = 10;
};

/// D x c' matrix with orthonormal columns and the run that produced it.
struct OrthoBasis {
  Eigen::MatrixXd B;
  Trace trace;
  int iterations = 0;
  double mu0 = 0.0;
  /// Which eigenvectors seeded the run.
  std::string init = "spectral:smallest-eigenvalues";
};

/// sum_j ||B^T x_j||_2.
double rsgm_objective(const Eigen::MatrixXd& points, const Eigen::MatrixXd& B);

/// Eigenvectors of X X^T for the c' smallest eigenvalues, each signed so its
/// largest-magnitude entry is positive.
OrthoBasis spectral_init(const DataMatrix& matrix, int c_prime);

/// Riemannian subgradient descent on the Stiefel manifold with polar
/// retraction, started from the spectral initialization.
OrthoBasis rsgm_run(const DataMatrix& matrix, int c_prime, const RsgmSchedule& schedule = {}, int max_iters = 300);

/// Same, from an explicit orthonormal B0.
OrthoBasis rsgm_run(const DataMatrix& matrix, const Eigen::MatrixXd& B0, const RsgmSchedule& schedule = {},
                    int max_iters = 300);

}  // namespace dpcp
