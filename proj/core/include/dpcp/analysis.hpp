#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dpcp/dataset.hpp"

namespace dpcp {

/// How the codimension is read off the singular values of a dual basis.
struct RankStrategy {
  enum class Kind { Gap, Threshold };
  Kind kind = Kind::Gap;
  /// Gap rule: smallest ratio sigma_i / sigma_{i+1} accepted as a gap.
  double min_ratio = 10.0;
  /// Threshold rule: count of sigma_i > tau * sigma_1.
  double tau = 0.05;

  static RankStrategy gap(double min_ratio = 10.0);
  static RankStrategy threshold(double tau = 0.05);
};

struct RankEstimate {
  int rank = 0;
  Eigen::VectorXd singular_values;  // descending
};

/// Gap rule: argmax_i sigma_i / sigma_{i+1} over 1 <= i < c', or c' when the
/// largest ratio is below `min_ratio`. A zero matrix has rank 0.
RankEstimate estimate_rank(const Eigen::MatrixXd& B, const RankStrategy& strategy = RankStrategy::gap());

/// Leading `rank` left singular vectors of B. Throws when `rank` exceeds the
/// numerical rank of B.
Eigen::MatrixXd orthonormal_column_space(const Eigen::MatrixXd& B, int rank);

/// min over orthogonal Q of ||B - A Q||_F for same-shape orthonormal bases.
double subspace_distance(const Eigen::MatrixXd& B, const Eigen::MatrixXd& A);

/// ||P_span(B) - P_span(A)||_F; B may be any nonzero basis (it is
/// orthonormalized at its numerical rank), A must be orthonormal.
double projection_distance(const Eigen::MatrixXd& B_any, const Eigen::MatrixXd& A_orthonormal);

enum class AngleTarget { S, Sperp };

/// Per column, the angle arccos(||P_target b|| / ||b||) in [0, pi/2].
std::vector<double> principal_angles(const Eigen::MatrixXd& B, const SubspaceModel& subspace, AngleTarget against);

/// Largest principal angle between two orthonormal bases; pi/2 when their
/// dimensions differ.
double max_principal_angle(const Eigen::MatrixXd& Q_B, const Eigen::MatrixXd& Q_A);

struct ThresholdStrategy {
  bool automatic = true;
  double value = 0.0;
  /// Automatic rule: only gaps of at least this size may split; without one
  /// no outliers are flagged.
  double min_gap = 1e-6;

  static ThresholdStrategy largest_gap(double min_gap = 1e-6);
  static ThresholdStrategy fixed(double t);
};

struct Classification {
  std::vector<Label> labels;
  Eigen::VectorXd scores;
  double threshold = 0.0;
};

/// Scores each column by ||basis^T x_j|| and flags it an outlier when the
/// score exceeds the threshold. The automatic threshold splits the sorted
/// scores at their largest ratio s_{i+1} / s_i (geometric midpoint).
Classification classify_outliers(const DataMatrix& matrix, const Eigen::MatrixXd& complement_basis,
                                 const ThresholdStrategy& strategy = ThresholdStrategy::largest_gap());

struct F1Score {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
};

/// Outliers are the positive class. With no positives anywhere every score
/// is 1; otherwise an undefined ratio is 0.
F1Score f1_score(const std::vector<Label>& predicted, const std::vector<Label>& truth);

struct FullRankCheck {
  bool holds = false;
  double sigma_min = 0.0;
};

/// sigma_{c'}(B0) > delta_bound, where sigma_{c'} is 0 when c' > D.
FullRankCheck check_full_rank_condition(const Eigen::MatrixXd& B0, double delta_bound);

struct RecoveryReport {
  int estimated_codim = 0;
  Eigen::VectorXd singular_values;
  Eigen::MatrixXd orthonormalized_complement;
  std::optional<double> procrustes_distance;
  std::optional<double> projection_distance;
  std::optional<double> max_principal_angle;
  std::optional<double> outlier_f1;
  std::optional<double> precision;
  std::optional<double> recall;
};

struct ReportOptions {
  RankStrategy rank = RankStrategy::gap();
  ThresholdStrategy threshold = ThresholdStrategy::largest_gap();
  /// Force the codimension instead of estimating it (used for orthonormal
  /// baselines whose rank is fixed by construction).
  std::optional<int> codim;
};

/// Rank estimate, complement basis and every metric the inputs allow:
/// distances need `truth`, F1 needs `data` with labels.
RecoveryReport make_report(const Eigen::MatrixXd& B, const DataMatrix* data, const SubspaceModel* truth,
                           const ReportOptions& options = {});

nlohmann::json to_json(const RecoveryReport& report);
RecoveryReport recovery_report_from_json(const nlohmann::json& j);

}  // namespace dpcp
