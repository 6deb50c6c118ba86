#include "dpcp/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpcp/error.hpp"

namespace dpcp {

RankStrategy RankStrategy::gap(double min_ratio) {
  RankStrategy s;
  s.kind = Kind::Gap;
  s.min_ratio = min_ratio;
  return s;
}

RankStrategy RankStrategy::threshold(double tau) {
  RankStrategy s;
  s.kind = Kind::Threshold;
  s.tau = tau;
  return s;
}

ThresholdStrategy ThresholdStrategy::largest_gap(double min_gap) {
  ThresholdStrategy s;
  s.automatic = true;
  s.min_gap = min_gap;
  return s;
}

ThresholdStrategy ThresholdStrategy::fixed(double t) {
  ThresholdStrategy s;
  s.automatic = false;
  s.value = t;
  return s;
}

namespace {

Eigen::VectorXd singular_values(const Eigen::MatrixXd& B) {
  if (B.size() == 0) return Eigen::VectorXd();
  return Eigen::JacobiSVD<Eigen::MatrixXd>(B).singularValues();
}

int numerical_rank(const Eigen::VectorXd& sv, Eigen::Index rows, Eigen::Index cols) {
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double tol = static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() * sv(0);
  return static_cast<int>((sv.array() > tol).count());
}

void check_orthonormal(const Eigen::MatrixXd& A, const char* name) {
  const Eigen::MatrixXd gram = A.transpose() * A;
  if ((gram - Eigen::MatrixXd::Identity(A.cols(), A.cols())).cwiseAbs().maxCoeff() > 1e-8)
    throw Error(ErrorKind::NotOrthonormal, std::string(name) + " is not orthonormal");
}

}  // namespace

RankEstimate estimate_rank(const Eigen::MatrixXd& B, const RankStrategy& strategy) {
  RankEstimate out;
  out.singular_values = singular_values(B);
  const Eigen::VectorXd& s = out.singular_values;
  const Eigen::Index n = s.size();
  if (n == 0 || s(0) == 0.0) return out;
  if (strategy.kind == RankStrategy::Kind::Threshold) {
    out.rank = static_cast<int>((s.array() > strategy.tau * s(0)).count());
    return out;
  }
  double best = 0.0;
  int best_i = static_cast<int>(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double ratio = s(i + 1) > 0.0 ? s(i) / s(i + 1) : std::numeric_limits<double>::infinity();
    if (ratio > best) {
      best = ratio;
      best_i = static_cast<int>(i + 1);
    }
    if (s(i + 1) == 0.0) break;
  }
  out.rank = best >= strategy.min_ratio ? best_i : static_cast<int>(n);
  return out;
}

Eigen::MatrixXd orthonormal_column_space(const Eigen::MatrixXd& B, int rank) {
  if (rank < 0) throw Error(ErrorKind::InvalidDimension, "rank must be nonnegative");
  if (rank == 0) return Eigen::MatrixXd(B.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU);
  if (rank > numerical_rank(svd.singularValues(), B.rows(), B.cols()))
    throw Error(ErrorKind::RankExceeded, "rank " + std::to_string(rank) + " exceeds the numerical rank of the basis");
  return svd.matrixU().leftCols(rank);
}

double subspace_distance(const Eigen::MatrixXd& B, const Eigen::MatrixXd& A) {
  if (B.rows() != A.rows() || B.cols() != A.cols())
    throw Error(ErrorKind::DimensionMismatch, "subspace distance needs equal shapes");
  check_orthonormal(B, "B");
  check_orthonormal(A, "A");
  if (A.cols() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A.transpose() * B, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::MatrixXd Q = svd.matrixU() * svd.matrixV().transpose();
  return (B - A * Q).norm();
}

double projection_distance(const Eigen::MatrixXd& B_any, const Eigen::MatrixXd& A_orthonormal) {
  if (B_any.rows() != A_orthonormal.rows()) throw Error(ErrorKind::DimensionMismatch, "projection distance needs equal D");
  check_orthonormal(A_orthonormal, "A");
  const Eigen::VectorXd sv = singular_values(B_any);
  const int rank = numerical_rank(sv, B_any.rows(), B_any.cols());
  if (rank == 0) throw Error(ErrorKind::InvalidDimension, "projection distance of a zero basis");
  const Eigen::MatrixXd Q = orthonormal_column_space(B_any, rank);
  return (Q * Q.transpose() - A_orthonormal * A_orthonormal.transpose()).norm();
}

std::vector<double> principal_angles(const Eigen::MatrixXd& B, const SubspaceModel& subspace, AngleTarget against) {
  if (B.rows() != subspace.ambient_dim()) throw Error(ErrorKind::DimensionMismatch, "basis and subspace dimensions differ");
  const Eigen::MatrixXd& target = against == AngleTarget::S ? subspace.basis_s() : subspace.basis_sperp();
  const Eigen::MatrixXd& other = against == AngleTarget::S ? subspace.basis_sperp() : subspace.basis_s();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(B.cols()));
  for (Eigen::Index i = 0; i < B.cols(); ++i) {
    const double in = (target.transpose() * B.col(i)).norm();
    const double off = (other.transpose() * B.col(i)).norm();
    out.push_back(std::atan2(off, in));
  }
  return out;
}

double max_principal_angle(const Eigen::MatrixXd& Q_B, const Eigen::MatrixXd& Q_A) {
  if (Q_B.rows() != Q_A.rows()) throw Error(ErrorKind::DimensionMismatch, "bases live in different spaces");
  if (Q_B.cols() != Q_A.cols()) return std::numbers::pi / 2.0;
  if (Q_B.cols() == 0) return 0.0;
  const Eigen::MatrixXd residual = Q_B - Q_A * (Q_A.transpose() * Q_B);
  const double s = singular_values(residual)(0);
  return std::asin(std::min(1.0, s));
}

Classification classify_outliers(const DataMatrix& matrix, const Eigen::MatrixXd& complement_basis,
                                 const ThresholdStrategy& strategy) {
  if (complement_basis.rows() != matrix.ambient_dim())
    throw Error(ErrorKind::DimensionMismatch, "basis and data dimensions differ");
  Classification out;
  out.scores = (complement_basis.transpose() * matrix.points()).colwise().norm().transpose();
  if (complement_basis.cols() == 0) out.scores = Eigen::VectorXd::Zero(matrix.size());
  out.threshold = strategy.value;
  if (strategy.automatic) {
    out.threshold = std::numeric_limits<double>::infinity();
    std::vector<double> sorted(out.scores.data(), out.scores.data() + out.scores.size());
    std::sort(sorted.begin(), sorted.end());
    // Scores of a good fit span orders of magnitude (inliers near 0), so gaps
    // are measured multiplicatively; a split also needs an absolute gap of at
    // least min_gap.
    constexpr double kTiny = 1e-300;
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      if (sorted[i + 1] - sorted[i] < strategy.min_gap) continue;
      const double lo = std::max(sorted[i], kTiny);
      const double gap = std::log(sorted[i + 1]) - std::log(lo);
      if (gap > best) {
        best = gap;
        out.threshold = std::sqrt(lo * sorted[i + 1]);
      }
    }
  }
  out.labels.reserve(static_cast<std::size_t>(matrix.size()));
  for (Eigen::Index j = 0; j < out.scores.size(); ++j)
    out.labels.push_back(out.scores(j) > out.threshold ? Label::Outlier : Label::Inlier);
  return out;
}

F1Score f1_score(const std::vector<Label>& predicted, const std::vector<Label>& truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorKind::DimensionMismatch, "predicted and true label counts differ");
  F1Score s;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == Label::Outlier;
    const bool t = truth[i] == Label::Outlier;
    s.tp += p && t;
    s.fp += p && !t;
    s.fn += !p && t;
  }
  if (s.tp + s.fp + s.fn == 0) {
    s.precision = s.recall = s.f1 = 1.0;
    return s;
  }
  s.precision = s.tp + s.fp ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fp) : 0.0;
  s.recall = s.tp + s.fn ? static_cast<double>(s.tp) / static_cast<double>(s.tp + s.fn) : 0.0;
  s.f1 = s.precision + s.recall > 0.0 ? 2.0 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

FullRankCheck check_full_rank_condition(const Eigen::MatrixXd& B0, double delta_bound) {
  FullRankCheck out;
  if (B0.cols() <= B0.rows() && B0.cols() > 0) out.sigma_min = singular_values(B0)(B0.cols() - 1);
  out.holds = out.sigma_min > delta_bound;
  return out;
}

RecoveryReport make_report(const Eigen::MatrixXd& B, const DataMatrix* data, const SubspaceModel* truth,
                           const ReportOptions& options) {
  RecoveryReport r;
  const RankEstimate rank = estimate_rank(B, options.rank);
  r.singular_values = rank.singular_values;
  r.estimated_codim = options.codim.value_or(rank.rank);
  r.orthonormalized_complement = orthonormal_column_space(B, r.estimated_codim);
  if (truth) {
    const Eigen::MatrixXd& Sperp = truth->basis_sperp();
    if (r.estimated_codim == Sperp.cols()) r.procrustes_distance = subspace_distance(r.orthonormalized_complement, Sperp);
    r.projection_distance =
        r.estimated_codim > 0
            ? (r.orthonormalized_complement * r.orthonormalized_complement.transpose() - Sperp * Sperp.transpose()).norm()
            : Sperp.norm();
    r.max_principal_angle = max_principal_angle(r.orthonormalized_complement, Sperp);
  }
  if (data && data->has_labels()) {
    const Classification cls = classify_outliers(*data, r.orthonormalized_complement, options.threshold);
    const F1Score f = f1_score(cls.labels, *data->labels());
    r.outlier_f1 = f.f1;
    r.precision = f.precision;
    r.recall = f.recall;
  }
  return r;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

nlohmann::json to_json(const RecoveryReport& r) {
  nlohmann::json basis = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.orthonormalized_complement.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < r.orthonormalized_complement.cols(); ++j) row.push_back(r.orthonormalized_complement(i, j));
    basis.push_back(std::move(row));
  }
  return {{"estimated_codim", r.estimated_codim},
          {"singular_values", std::vector<double>(r.singular_values.data(), r.singular_values.data() + r.singular_values.size())},
          {"orthonormalized_complement", std::move(basis)},
          {"procrustes_distance", opt(r.procrustes_distance)},
          {"projection_distance", opt(r.projection_distance)},
          {"max_principal_angle", opt(r.max_principal_angle)},
          {"outlier_f1", opt(r.outlier_f1)},
          {"precision", opt(r.precision)},
          {"recall", opt(r.recall)}};
}

RecoveryReport recovery_report_from_json(const nlohmann::json& j) {
  RecoveryReport r;
  try {
    r.estimated_codim = j.at("estimated_codim").get<int>();
    const auto sv = j.at("singular_values").get<std::vector<double>>();
    r.singular_values = Eigen::Map<const Eigen::VectorXd>(sv.data(), static_cast<Eigen::Index>(sv.size()));
    const auto& basis = j.at("orthonormalized_complement");
    r.orthonormalized_complement.resize(static_cast<Eigen::Index>(basis.size()), r.estimated_codim);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      if (basis[i].size() != static_cast<std::size_t>(r.estimated_codim))
        throw Error(ErrorKind::Parse, "complement row " + std::to_string(i) + " has the wrong length");
      for (std::size_t k = 0; k < basis[i].size(); ++k)
        r.orthonormalized_complement(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = basis[i][k].get<double>();
    }
    r.procrustes_distance = opt_from(j, "procrustes_distance");
    r.projection_distance = opt_from(j, "projection_distance");
    r.max_principal_angle = opt_from(j, "max_principal_angle");
    r.outlier_f1 = opt_from(j, "outlier_f1");
    r.precision = opt_from(j, "precision");
    r.recall = opt_from(j, "recall");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("recovery report: ") + e.what());
  }
  return r;
}

}  // namespace dpcp
