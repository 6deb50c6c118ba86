#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dpcp/random.hpp"

namespace dpcp {

enum class Label : unsigned char { Inlier, Outlier };

/// A D x n matrix of column points with optional per-column ground truth.
///
/// Column order is the (unknown) permutation of inliers and outliers; the
/// label list, when present, records which is which. Construction validates
/// finiteness, label count and, when `unit_normalized` is set, unit norms.
class DataMatrix {
 public:
  explicit DataMatrix(Eigen::MatrixXd points,
                      std::optional<std::vector<Label>> labels = std::nullopt,
                      bool unit_normalized = false);

  Eigen::Index ambient_dim() const { return points_.rows(); }
  Eigen::Index size() const { return points_.cols(); }
  const Eigen::MatrixXd& points() const { return points_; }
  const std::optional<std::vector<Label>>& labels() const { return labels_; }
  bool has_labels() const { return labels_.has_value(); }
  bool unit_normalized() const { return unit_normalized_; }

  std::size_t count(Label label) const;
  /// Columns carrying `label`, in stored order. Requires labels.
  Eigen::MatrixXd columns_with(Label label) const;

  /// Exact equality of points, labels and the normalization flag.
  friend bool operator==(const DataMatrix& a, const DataMatrix& b);

 private:
  Eigen::MatrixXd points_;
  std::optional<std::vector<Label>> labels_;
  bool unit_normalized_;
};

/// Ground-truth inlier subspace S with orthonormal bases of S and its complement.
class SubspaceModel {
 public:
  /// Validates orthonormality (1e-10), mutual orthogonality and d + c = D.
  SubspaceModel(Eigen::MatrixXd basis_s, Eigen::MatrixXd basis_sperp);

  /// Builds the model from an orthonormal basis of the complement alone.
  static SubspaceModel from_complement(const Eigen::MatrixXd& basis_sperp);

  Eigen::Index ambient_dim() const { return basis_s_.rows(); }
  Eigen::Index inlier_dim() const { return basis_s_.cols(); }
  Eigen::Index codim() const { return basis_sperp_.cols(); }
  const Eigen::MatrixXd& basis_s() const { return basis_s_; }
  const Eigen::MatrixXd& basis_sperp() const { return basis_sperp_; }

  Eigen::VectorXd project_s(const Eigen::VectorXd& v) const { return basis_s_ * (basis_s_.transpose() * v); }
  Eigen::VectorXd project_sperp(const Eigen::VectorXd& v) const {
    return basis_sperp_ * (basis_sperp_.transpose() * v);
  }

 private:
  Eigen::MatrixXd basis_s_;
  Eigen::MatrixXd basis_sperp_;
};

/// Haar-distributed d-dimensional subspace of R^D (QR of a Gaussian matrix,
/// signs fixed so the triangular factor has a positive diagonal).
SubspaceModel sample_haar_subspace(Eigen::Index D, Eigen::Index d, Seed seed);

/// N unit inliers uniform on the sphere of S and M unit outliers uniform on
/// S^{D-1}, shuffled by a seed-determined permutation, labels recorded.
DataMatrix generate_dataset(const SubspaceModel& model, Eigen::Index N, Eigen::Index M, Seed seed);

/// Replaces ceil(r * n) seed-chosen columns by uniform unit outliers. Those
/// columns become outliers and every other column is relabeled inlier.
DataMatrix corrupt_with_outliers(const DataMatrix& matrix, double ratio, Seed seed);

/// Scales every column to unit Euclidean norm.
DataMatrix normalize_columns(const DataMatrix& matrix);

/// Number of columns replaced by corrupt_with_outliers for n columns.
Eigen::Index corruption_count(Eigen::Index n, double ratio);

// --- CSV -------------------------------------------------------------------

enum class CsvOrientation { RowsArePoints, RowsAreDimensions };

struct CsvOptions {
  CsvOrientation orientation = CsvOrientation::RowsArePoints;
  bool write_header = true;
};

/// Loads a data matrix. An optional first row of non-numeric cells is a
/// header; a header cell named "label" (last column, points orientation)
/// carries "in"/"out" tags.
DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options = {});
void save_csv(const DataMatrix& matrix, const std::filesystem::path& path, const CsvOptions& options = {});

/// Plain numeric matrix, one CSV row per matrix row (bases, dual bases).
Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path);
void save_matrix_csv(const Eigen::MatrixXd& matrix, const std::filesystem::path& path);

/// "%.17g" formatting used by every writer in the library.
std::string format_double(double value);

}  // namespace dpcp
