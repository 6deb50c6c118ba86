#include "dpcp/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

#include "dpcp/error.hpp"

namespace dpcp {

namespace {

constexpr double kUnitTol = 1e-9;
constexpr double kBasisTol = 1e-10;

bool is_identity(const Eigen::MatrixXd& m, double tol) {
  return (m - Eigen::MatrixXd::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff() <= tol;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::optional<double> parse_number(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size()) return std::nullopt;
  return v;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

RawTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  RawTable table;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv_line(line);
    if (first) {
      first = false;
      const bool all_numeric = std::all_of(cells.begin(), cells.end(),
                                           [](const std::string& c) { return parse_number(c).has_value(); });
      const bool any_numeric = std::any_of(cells.begin(), cells.end(),
                                           [](const std::string& c) { return parse_number(c).has_value(); });
      if (!all_numeric && !any_numeric) {
        table.header = std::move(cells);
        continue;
      }
    }
    table.rows.push_back(std::move(cells));
    table.line_numbers.push_back(line_no);
  }
  return table;
}

}  // namespace

DataMatrix::DataMatrix(Eigen::MatrixXd points, std::optional<std::vector<Label>> labels, bool unit_normalized)
    : points_(std::move(points)), labels_(std::move(labels)), unit_normalized_(unit_normalized) {
  if (points_.rows() < 1) throw Error(ErrorKind::InvalidDimension, "ambient dimension must be positive");
  if (!points_.allFinite()) throw Error(ErrorKind::Parse, "data matrix contains non-finite entries");
  if (labels_ && static_cast<Eigen::Index>(labels_->size()) != points_.cols())
    throw Error(ErrorKind::DimensionMismatch, "label count " + std::to_string(labels_->size()) +
                                                  " does not match column count " + std::to_string(points_.cols()));
  if (unit_normalized_) {
    for (Eigen::Index j = 0; j < points_.cols(); ++j) {
      if (std::abs(points_.col(j).norm() - 1.0) > kUnitTol)
        throw Error(ErrorKind::DegenerateColumn, "column " + std::to_string(j) + " is not unit norm");
    }
  }
}

bool operator==(const DataMatrix& a, const DataMatrix& b) {
  return a.points_.rows() == b.points_.rows() && a.points_.cols() == b.points_.cols() &&
         a.points_ == b.points_ && a.labels_ == b.labels_ && a.unit_normalized_ == b.unit_normalized_;
}

std::size_t DataMatrix::count(Label label) const {
  if (!labels_) return 0;
  return static_cast<std::size_t>(std::count(labels_->begin(), labels_->end(), label));
}

Eigen::MatrixXd DataMatrix::columns_with(Label label) const {
  if (!labels_) throw Error(ErrorKind::MissingLabels, "data matrix has no labels");
  Eigen::MatrixXd out(points_.rows(), static_cast<Eigen::Index>(count(label)));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < points_.cols(); ++j)
    if ((*labels_)[static_cast<std::size_t>(j)] == label) out.col(k++) = points_.col(j);
  return out;
}

SubspaceModel::SubspaceModel(Eigen::MatrixXd basis_s, Eigen::MatrixXd basis_sperp)
    : basis_s_(std::move(basis_s)), basis_sperp_(std::move(basis_sperp)) {
  if (basis_s_.rows() != basis_sperp_.rows())
    throw Error(ErrorKind::DimensionMismatch, "bases of S and its complement live in different spaces");
  if (basis_s_.cols() + basis_sperp_.cols() != basis_s_.rows() || basis_s_.cols() < 1 || basis_sperp_.cols() < 1)
    throw Error(ErrorKind::InvalidDimension, "need 1 <= d < D and d + c = D");
  if (!is_identity(basis_s_.transpose() * basis_s_, kBasisTol) ||
      !is_identity(basis_sperp_.transpose() * basis_sperp_, kBasisTol) ||
      (basis_s_.transpose() * basis_sperp_).cwiseAbs().maxCoeff() > kBasisTol)
    throw Error(ErrorKind::NotOrthonormal, "subspace bases are not orthonormal complements");
}

SubspaceModel SubspaceModel::from_complement(const Eigen::MatrixXd& basis_sperp) {
  const Eigen::Index D = basis_sperp.rows();
  const Eigen::Index c = basis_sperp.cols();
  if (c < 1 || c >= D) throw Error(ErrorKind::InvalidDimension, "complement dimension must satisfy 1 <= c < D");
  // Full QR of the complement basis: trailing columns of Q span S.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(basis_sperp);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(D, D);
  Eigen::MatrixXd s = q.rightCols(D - c);
  // Re-orthogonalize the given complement so tiny input drift does not trip validation.
  Eigen::MatrixXd sperp = q.leftCols(c);
  Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(c, c).triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < c; ++i)
    if (r(i, i) < 0) sperp.col(i) *= -1.0;
  return SubspaceModel(std::move(s), std::move(sperp));
}

SubspaceModel sample_haar_subspace(Eigen::Index D, Eigen::Index d, Seed seed) {
  if (d < 1 || d >= D) throw Error(ErrorKind::InvalidDimension, "need 1 <= d < D, got d=" + std::to_string(d) +
                                                                    " D=" + std::to_string(D));
  Rng rng(seed);
  const Eigen::MatrixXd g = rng.normal_matrix(D, D);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(D, D);
  for (Eigen::Index i = 0; i < D; ++i)
    if (qr.matrixQR()(i, i) < 0) q.col(i) *= -1.0;
  return SubspaceModel(q.leftCols(d), q.rightCols(D - d));
}

DataMatrix generate_dataset(const SubspaceModel& model, Eigen::Index N, Eigen::Index M, Seed seed) {
  if (N < 0 || M < 0) throw Error(ErrorKind::InvalidDimension, "point counts must be nonnegative");
  if (N + M == 0) throw Error(ErrorKind::EmptyDataset, "N = M = 0");
  const Eigen::Index D = model.ambient_dim();
  const Eigen::Index d = model.inlier_dim();
  Rng rng(seed);
  Eigen::MatrixXd ordered(D, N + M);
  for (Eigen::Index j = 0; j < N; ++j) {
    Eigen::VectorXd x = model.basis_s() * rng.unit_vector(d);
    ordered.col(j) = x / x.norm();
  }
  for (Eigen::Index j = 0; j < M; ++j) ordered.col(N + j) = rng.unit_vector(D);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(N + M));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);

  Eigen::MatrixXd points(D, N + M);
  std::vector<Label> labels(perm.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    points.col(static_cast<Eigen::Index>(j)) = ordered.col(perm[j]);
    labels[j] = perm[j] < N ? Label::Inlier : Label::Outlier;
  }
  return DataMatrix(std::move(points), std::move(labels), true);
}

Eigen::Index corruption_count(Eigen::Index n, double ratio) {
  // The small slack keeps products such as 0.7 * 10 from rounding up to 8.
  return static_cast<Eigen::Index>(std::ceil(ratio * static_cast<double>(n) - 1e-9));
}

DataMatrix corrupt_with_outliers(const DataMatrix& matrix, double ratio, Seed seed) {
  if (!(ratio >= 0.0) || ratio >= 1.0) throw Error(ErrorKind::InvalidRatio, "ratio must lie in [0, 1)");
  const Eigen::Index n = matrix.size();
  if (n == 0) throw Error(ErrorKind::EmptyDataset, "cannot corrupt an empty matrix");
  const Eigen::Index k = corruption_count(n, ratio);

  Rng rng(seed);
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(n - i));
    std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
  }

  Eigen::MatrixXd points = matrix.points();
  std::vector<Label> labels(static_cast<std::size_t>(n), Label::Inlier);
  for (Eigen::Index i = 0; i < k; ++i) {
    const Eigen::Index col = idx[static_cast<std::size_t>(i)];
    points.col(col) = rng.unit_vector(matrix.ambient_dim());
    labels[static_cast<std::size_t>(col)] = Label::Outlier;
  }
  return DataMatrix(std::move(points), std::move(labels), matrix.unit_normalized());
}

DataMatrix normalize_columns(const DataMatrix& matrix) {
  Eigen::MatrixXd points = matrix.points();
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double norm = points.col(j).norm();
    if (norm == 0.0) throw Error(ErrorKind::DegenerateColumn, "column " + std::to_string(j) + " is zero");
    points.col(j) /= norm;
  }
  return DataMatrix(std::move(points), matrix.labels(), true);
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

DataMatrix load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  RawTable table = read_table(path);
  if (table.rows.empty()) throw Error(ErrorKind::EmptyDataset, path.string() + " has no data rows");

  const bool has_label =
      !table.header.empty() && table.header.back() == "label" && options.orientation == CsvOrientation::RowsArePoints;
  const std::size_t width = table.rows.front().size();
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != width)
      throw Error(ErrorKind::Parse, "row " + std::to_string(table.line_numbers[r]) + " has " +
                                        std::to_string(table.rows[r].size()) + " cells, expected " +
                                        std::to_string(width));
  }
  if (!table.header.empty() && table.header.size() != width)
    throw Error(ErrorKind::Parse, "header has " + std::to_string(table.header.size()) + " cells, expected " +
                                      std::to_string(width));
  const std::size_t numeric_width = has_label ? width - 1 : width;
  if (numeric_width == 0) throw Error(ErrorKind::Parse, "no numeric columns");

  Eigen::MatrixXd grid(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(numeric_width));
  std::vector<Label> labels;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    for (std::size_t c = 0; c < numeric_width; ++c) {
      const auto v = parse_number(table.rows[r][c]);
      if (!v)
        throw Error(ErrorKind::Parse, "row " + std::to_string(table.line_numbers[r]) + " column " +
                                          std::to_string(c + 1) + ": non-numeric cell '" + table.rows[r][c] + "'");
      grid(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
    }
    if (has_label) {
      const std::string& tag = table.rows[r].back();
      if (tag == "in") labels.push_back(Label::Inlier);
      else if (tag == "out") labels.push_back(Label::Outlier);
      else
        throw Error(ErrorKind::Parse, "row " + std::to_string(table.line_numbers[r]) + ": label must be in/out, got '" +
                                          tag + "'");
    }
  }
  Eigen::MatrixXd points = options.orientation == CsvOrientation::RowsArePoints ? Eigen::MatrixXd(grid.transpose())
                                                                                 : grid;
  bool unit = true;
  for (Eigen::Index j = 0; j < points.cols() && unit; ++j) unit = std::abs(points.col(j).norm() - 1.0) <= kUnitTol;
  std::optional<std::vector<Label>> maybe_labels;
  if (has_label) maybe_labels = std::move(labels);
  return DataMatrix(std::move(points), std::move(maybe_labels), unit);
}

void save_csv(const DataMatrix& matrix, const std::filesystem::path& path, const CsvOptions& options) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  const auto& p = matrix.points();
  const bool points_rows = options.orientation == CsvOrientation::RowsArePoints;
  const bool with_labels = matrix.has_labels() && points_rows;
  const Eigen::Index rows = points_rows ? p.cols() : p.rows();
  const Eigen::Index cols = points_rows ? p.rows() : p.cols();
  if (options.write_header) {
    for (Eigen::Index c = 0; c < cols; ++c) out << (c ? "," : "") << (points_rows ? "x" : "p") << c;
    if (with_labels) out << ",label";
    out << '\n';
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) out << (c ? "," : "") << format_double(points_rows ? p(c, r) : p(r, c));
    if (with_labels) out << ',' << ((*matrix.labels())[static_cast<std::size_t>(r)] == Label::Inlier ? "in" : "out");
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  RawTable table = read_table(path);
  if (table.rows.empty()) throw Error(ErrorKind::EmptyDataset, path.string() + " has no data rows");
  const std::size_t width = table.rows.front().size();
  Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    if (table.rows[r].size() != width)
      throw Error(ErrorKind::Parse, "row " + std::to_string(table.line_numbers[r]) + " has " +
                                        std::to_string(table.rows[r].size()) + " cells, expected " +
                                        std::to_string(width));
    for (std::size_t c = 0; c < width; ++c) {
      const auto v = parse_number(table.rows[r][c]);
      if (!v)
        throw Error(ErrorKind::Parse, "row " + std::to_string(table.line_numbers[r]) + " column " +
                                          std::to_string(c + 1) + ": non-numeric cell '" + table.rows[r][c] + "'");
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
    }
  }
  return m;
}

void save_matrix_csv(const Eigen::MatrixXd& matrix, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) out << (c ? "," : "") << format_double(matrix(r, c));
    out << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace dpcp
