#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <gtest/gtest.h>

#include "dpcp/dataset.hpp"
#include "test_util.hpp"

namespace dpcp {
namespace {

using testing::TempDir;

void expect_valid_model(const SubspaceModel& model) {
  const auto d = model.inlier_dim();
  const auto c = model.codim();
  EXPECT_EQ(d + c, model.ambient_dim());
  EXPECT_LT((model.basis_s().transpose() * model.basis_s() - Eigen::MatrixXd::Identity(d, d)).norm(), 1e-10);
  EXPECT_LT((model.basis_sperp().transpose() * model.basis_sperp() - Eigen::MatrixXd::Identity(c, c)).norm(), 1e-10);
  EXPECT_LT((model.basis_s().transpose() * model.basis_sperp()).norm(), 1e-10);
}

TEST(HaarSubspace, PlaneInR3HasCodimOne) {
  for (Seed seed : {0ULL, 1ULL, 99ULL}) {
    const auto model = sample_haar_subspace(3, 2, seed);
    EXPECT_EQ(model.codim(), 1);
    expect_valid_model(model);
  }
}

TEST(HaarSubspace, HighDimensionalShape) {
  const auto model = sample_haar_subspace(200, 195, 7);
  EXPECT_EQ(model.codim(), 5);
  EXPECT_EQ(model.basis_sperp().rows(), 200);
  EXPECT_EQ(model.basis_sperp().cols(), 5);
  expect_valid_model(model);
}

TEST(HaarSubspace, LineInPlaneComplementIsRotation) {
  for (Seed seed = 0; seed < 20; ++seed) {
    const auto model = sample_haar_subspace(2, 1, seed);
    const Eigen::Vector2d s = model.basis_s().col(0);
    const Eigen::Vector2d rotated(-s.y(), s.x());
    const Eigen::Vector2d sperp = model.basis_sperp().col(0);
    EXPECT_NEAR(std::abs(rotated.dot(sperp)), 1.0, 1e-12);
  }
}

TEST(HaarSubspace, RejectsBadDimensions) {
  EXPECT_DPCP_ERROR(sample_haar_subspace(3, 3, 1), ErrorKind::InvalidDimension);
  EXPECT_DPCP_ERROR(sample_haar_subspace(3, 4, 1), ErrorKind::InvalidDimension);
  EXPECT_DPCP_ERROR(sample_haar_subspace(3, 0, 1), ErrorKind::InvalidDimension);
}

TEST(HaarSubspace, Deterministic) {
  const auto a = sample_haar_subspace(10, 6, 42);
  const auto b = sample_haar_subspace(10, 6, 42);
  EXPECT_EQ(a.basis_s(), b.basis_s());
  EXPECT_EQ(a.basis_sperp(), b.basis_sperp());
}

TEST(HaarSubspace, ProjectionOfFirstAxisAveragesToRatio) {
  // Under the Haar measure E||P_S e1||^2 = d / D.
  const int trials = 4000;
  double total = 0.0;
  for (int t = 0; t < trials; ++t) {
    const auto model = sample_haar_subspace(5, 2, static_cast<Seed>(t));
    total += model.basis_s().row(0).squaredNorm();
  }
  EXPECT_NEAR(total / trials, 0.4, 0.02);
}

TEST(SubspaceModelTest, RejectsNonOrthonormal) {
  Eigen::MatrixXd s(3, 1), sperp(3, 2);
  s << 1, 1, 0;
  sperp << 0, 0, 0, 0, 1, 0;
  EXPECT_DPCP_ERROR(SubspaceModel(s, sperp), ErrorKind::NotOrthonormal);
}

TEST(SubspaceModelTest, FromComplementCompletesBasis) {
  const auto base = sample_haar_subspace(8, 5, 3);
  const auto model = SubspaceModel::from_complement(base.basis_sperp());
  expect_valid_model(model);
  EXPECT_EQ(model.inlier_dim(), 5);
}

TEST(GenerateDataset, CountsAndUnitNorms) {
  const auto model = sample_haar_subspace(200, 195, 7);
  const auto data = generate_dataset(model, 1500, 1500, 11);
  EXPECT_EQ(data.size(), 3000);
  EXPECT_TRUE(data.unit_normalized());
  EXPECT_EQ(data.count(Label::Inlier), 1500u);
  EXPECT_EQ(data.count(Label::Outlier), 1500u);
  for (Eigen::Index j = 0; j < data.size(); ++j) EXPECT_NEAR(data.points().col(j).norm(), 1.0, 1e-12);
}

TEST(GenerateDataset, SingleInlierLiesInSubspace) {
  const auto model = sample_haar_subspace(6, 4, 5);
  const auto data = generate_dataset(model, 1, 0, 8);
  ASSERT_EQ(data.size(), 1);
  const Eigen::VectorXd x = data.points().col(0);
  EXPECT_LT((x - model.project_s(x)).norm(), 1e-10);
}

TEST(GenerateDataset, InliersOrthogonalToComplement) {
  const auto model = sample_haar_subspace(30, 25, 2);
  const auto data = generate_dataset(model, 300, 50, 4);
  const Eigen::MatrixXd inliers = data.columns_with(Label::Inlier);
  for (Eigen::Index j = 0; j < inliers.cols(); ++j) {
    EXPECT_LE((model.basis_sperp().transpose() * inliers.col(j)).norm(), 1e-10);
  }
}

TEST(GenerateDataset, Deterministic) {
  const auto model = sample_haar_subspace(12, 8, 1);
  EXPECT_TRUE(generate_dataset(model, 100, 100, 3) == generate_dataset(model, 100, 100, 3));
  EXPECT_FALSE(generate_dataset(model, 100, 100, 3) == generate_dataset(model, 100, 100, 4));
}

TEST(GenerateDataset, ColumnsAreShuffled) {
  const auto model = sample_haar_subspace(12, 8, 1);
  const auto data = generate_dataset(model, 50, 50, 9);
  const auto& labels = *data.labels();
  EXPECT_FALSE(std::is_partitioned(labels.begin(), labels.end(), [](Label l) { return l == Label::Inlier; }));
}

TEST(GenerateDataset, EmptyIsRejected) {
  const auto model = sample_haar_subspace(4, 2, 1);
  EXPECT_DPCP_ERROR(generate_dataset(model, 0, 0, 1), ErrorKind::EmptyDataset);
}

TEST(GenerateDataset, OutlierMeanVanishes) {
  const auto model = sample_haar_subspace(10, 7, 1);
  const auto data = generate_dataset(model, 0, 100000, 21);
  const Eigen::VectorXd mean = data.points().rowwise().mean();
  for (Eigen::Index i = 0; i < mean.size(); ++i) EXPECT_LT(std::abs(mean(i)), 0.02);
}

TEST(Corruption, RatioPointEightOfHundred) {
  const auto model = sample_haar_subspace(10, 5, 1);
  const auto data = generate_dataset(model, 100, 0, 2);
  const auto corrupted = corrupt_with_outliers(data, 0.8, 3);
  EXPECT_EQ(corrupted.count(Label::Outlier), 80u);
  EXPECT_EQ(corrupted.count(Label::Inlier), 20u);
}

TEST(Corruption, ZeroRatioOnlyRelabels) {
  const auto model = sample_haar_subspace(10, 5, 1);
  const auto data = generate_dataset(model, 20, 20, 2);
  const auto corrupted = corrupt_with_outliers(data, 0.0, 3);
  EXPECT_EQ(corrupted.points(), data.points());
  EXPECT_EQ(corrupted.count(Label::Inlier), 40u);
}

TEST(Corruption, CeilingRuleAndReproducibleSet) {
  EXPECT_EQ(corruption_count(10, 0.25), 3);
  EXPECT_EQ(corruption_count(100, 0.9), 90);
  EXPECT_EQ(corruption_count(7, 0.0), 0);

  const auto model = sample_haar_subspace(6, 3, 1);
  const auto data = generate_dataset(model, 10, 0, 2);
  const auto a = corrupt_with_outliers(data, 0.25, 17);
  const auto b = corrupt_with_outliers(data, 0.25, 17);
  EXPECT_TRUE(a == b);
  int changed = 0;
  for (Eigen::Index j = 0; j < data.size(); ++j) {
    const bool differs = (a.points().col(j) - data.points().col(j)).norm() > 0.0;
    changed += differs ? 1 : 0;
    EXPECT_EQ(differs, (*a.labels())[static_cast<std::size_t>(j)] == Label::Outlier);
  }
  EXPECT_EQ(changed, 3);
}

TEST(Corruption, RejectsBadRatio) {
  const auto model = sample_haar_subspace(4, 2, 1);
  const auto data = generate_dataset(model, 5, 0, 2);
  EXPECT_DPCP_ERROR(corrupt_with_outliers(data, 1.0, 1), ErrorKind::InvalidRatio);
  EXPECT_DPCP_ERROR(corrupt_with_outliers(data, -0.1, 1), ErrorKind::InvalidRatio);
}

TEST(DataMatrixTest, ValidatesInvariants) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 0, std::nan("");
  EXPECT_DPCP_ERROR(DataMatrix{m}, ErrorKind::Parse);
  Eigen::MatrixXd ok(2, 2);
  ok << 1, 2, 0, 1;
  EXPECT_DPCP_ERROR(DataMatrix(ok, std::vector<Label>{Label::Inlier}), ErrorKind::DimensionMismatch);
  EXPECT_DPCP_ERROR(DataMatrix(ok, std::nullopt, true), ErrorKind::DegenerateColumn);
  EXPECT_DPCP_ERROR(DataMatrix(ok).columns_with(Label::Inlier), ErrorKind::MissingLabels);
}

TEST(Csv, RoundTripIsExact) {
  TempDir dir;
  Rng rng(5);
  const DataMatrix m(rng.normal_matrix(3, 4));
  save_csv(m, dir.file("m.csv"));
  EXPECT_TRUE(load_csv(dir.file("m.csv")) == m);

  const CsvOptions by_dims{CsvOrientation::RowsAreDimensions, false};
  save_csv(m, dir.file("t.csv"), by_dims);
  EXPECT_TRUE(load_csv(dir.file("t.csv"), by_dims) == m);
}

TEST(Csv, RoundTripKeepsLabelsAndNormalization) {
  TempDir dir;
  const auto model = sample_haar_subspace(5, 3, 1);
  const auto data = generate_dataset(model, 6, 4, 2);
  save_csv(data, dir.file("d.csv"));
  const auto loaded = load_csv(dir.file("d.csv"));
  EXPECT_EQ(loaded.points(), data.points());
  EXPECT_EQ(loaded.labels(), data.labels());
}

TEST(Csv, InconsistentRowNamesRow) {
  TempDir dir;
  std::ofstream(dir.file("bad.csv")) << "1,2,3\n4,5,6\n7,8\n";
  try {
    load_csv(dir.file("bad.csv"));
    FAIL() << "expected parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Parse);
    EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
  }
}

TEST(Csv, LabelColumnPopulatesLabels) {
  TempDir dir;
  std::ofstream(dir.file("l.csv")) << "x0,x1,label\n0.6,0.8,in\n1,0,out\n0,1,in\n";
  const auto m = load_csv(dir.file("l.csv"));
  ASSERT_TRUE(m.has_labels());
  EXPECT_EQ(m.ambient_dim(), 2);
  EXPECT_EQ(m.size(), 3);
  EXPECT_EQ((*m.labels())[1], Label::Outlier);
  EXPECT_EQ(m.count(Label::Inlier), 2u);
}

TEST(Csv, NonNumericCellIsParseError) {
  TempDir dir;
  std::ofstream(dir.file("n.csv")) << "1,2\n3,abc\n";
  EXPECT_DPCP_ERROR(load_csv(dir.file("n.csv")), ErrorKind::Parse);
  EXPECT_DPCP_ERROR(load_csv(dir.file("missing.csv")), ErrorKind::Io);
}

TEST(Csv, MatrixRoundTrip) {
  TempDir dir;
  Rng rng(8);
  const Eigen::MatrixXd m = rng.normal_matrix(4, 3);
  save_matrix_csv(m, dir.file("b.csv"));
  EXPECT_EQ(load_matrix_csv(dir.file("b.csv")), m);
}

TEST(FormatDouble, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(NormalizeColumns, Arithmetic) {
  Eigen::MatrixXd m(2, 1);
  m << 3, 4;
  const auto n = normalize_columns(DataMatrix(m));
  EXPECT_DOUBLE_EQ(n.points()(0, 0), 0.6);
  EXPECT_DOUBLE_EQ(n.points()(1, 0), 0.8);
  EXPECT_TRUE(n.unit_normalized());
}

TEST(NormalizeColumns, Idempotent) {
  const auto model = sample_haar_subspace(6, 3, 1);
  const auto data = generate_dataset(model, 10, 10, 2);
  EXPECT_LT((normalize_columns(data).points() - data.points()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NormalizeColumns, ZeroColumnNamed) {
  Eigen::MatrixXd m(2, 3);
  m << 1, 0, 2, 1, 0, 2;
  try {
    normalize_columns(DataMatrix(m));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DegenerateColumn);
    EXPECT_NE(std::string(e.what()).find("column 1"), std::string::npos);
  }
}

}  // namespace
}  // namespace dpcp
