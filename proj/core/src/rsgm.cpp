#include "dpcp/rsgm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "dpcp/error.hpp"

namespace dpcp {

double rsgm_objective(const Eigen::MatrixXd& points, const Eigen::MatrixXd& B) {
  if (points.rows() != B.rows()) throw Error(ErrorKind::DimensionMismatch, "basis and data dimensions differ");
  return (B.transpose() * points).colwise().norm().sum();
}

OrthoBasis spectral_init(const DataMatrix& matrix, int c_prime) {
  const Eigen::Index D = matrix.ambient_dim();
  if (c_prime < 1 || c_prime > D) throw Error(ErrorKind::InvalidDimension, "spectral init needs 1 <= c' <= D");
  const Eigen::MatrixXd& X = matrix.points();
  const Eigen::MatrixXd gram = X * X.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  OrthoBasis out;
  out.B = eig.eigenvectors().leftCols(c_prime);
  for (Eigen::Index j = 0; j < out.B.cols(); ++j) {
    Eigen::Index at = 0;
    out.B.col(j).cwiseAbs().maxCoeff(&at);
    if (out.B(at, j) < 0.0) out.B.col(j) *= -1.0;
  }
  return out;
}

OrthoBasis rsgm_run(const DataMatrix& matrix, int c_prime, const RsgmSchedule& schedule, int max_iters) {
  OrthoBasis init = spectral_init(matrix, c_prime);
  OrthoBasis out = rsgm_run(matrix, init.B, schedule, max_iters);
  out.init = init.init;
  return out;
}

OrthoBasis rsgm_run(const DataMatrix& matrix, const Eigen::MatrixXd& B0, const RsgmSchedule& schedule, int max_iters) {
  const Eigen::MatrixXd& X = matrix.points();
  if (B0.rows() != X.rows()) throw Error(ErrorKind::DimensionMismatch, "basis and data dimensions differ");
  if (B0.cols() < 1) throw Error(ErrorKind::InvalidDimension, "c' must be >= 1");
  if (!(schedule.beta > 0.0 && schedule.beta < 1.0) || schedule.K0 < 0 || schedule.K_star < 1)
    throw Error(ErrorKind::InvalidConfig, "need beta in (0, 1), K0 >= 0 and K* >= 1");
  if (max_iters < 0) throw Error(ErrorKind::InvalidConfig, "max_iters must be >= 0");

  OrthoBasis out;
  out.init = "explicit";
  out.B = B0;
  const Eigen::Index cp = B0.cols();
  auto riemannian_gradient = [&](const Eigen::MatrixXd& B, double* f) {
    Eigen::MatrixXd P = B.transpose() * X;
    const Eigen::RowVectorXd norms = P.colwise().norm();
    *f = norms.sum();
    for (Eigen::Index j = 0; j < P.cols(); ++j) {
      if (norms(j) > 0.0)
        P.col(j) /= norms(j);
      else
        P.col(j).setZero();
    }
    const Eigen::MatrixXd G = X * P.transpose();
    const Eigen::MatrixXd sym = B.transpose() * G;
    return Eigen::MatrixXd(G - 0.5 * B * (sym + sym.transpose()));
  };

  double f = 0.0;
  Eigen::MatrixXd GR = riemannian_gradient(out.B, &f);
  const double gr2 = GR.squaredNorm();
  out.mu0 = schedule.mu0.value_or(gr2 > 0.0 ? f / gr2 : 0.0);
  out.trace.push_back({0, f, 0.0, std::numeric_limits<double>::quiet_NaN(), 0, false, {}});
  for (int k = 0; k < max_iters; ++k) {
    if (GR.squaredNorm() == 0.0 || out.mu0 == 0.0) break;
    const double mu = k < schedule.K0 ? out.mu0 : out.mu0 * std::pow(schedule.beta, (k - schedule.K0) / schedule.K_star + 1);
    const Eigen::MatrixXd cand = out.B - mu * GR;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(cand, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Eigen::VectorXd& s = svd.singularValues();
    std::string note;
    if (s(cp - 1) <= 1e-12 * s(0)) note = "rank-deficient retraction regularized";
    out.B = svd.matrixU() * svd.matrixV().transpose();
    GR = riemannian_gradient(out.B, &f);
    out.trace.push_back({k + 1, f, mu, std::numeric_limits<double>::quiet_NaN(), 0, false, note});
    out.iterations = k + 1;
  }
  return out;
}

}  // namespace dpcp
