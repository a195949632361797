#include <gtest/gtest.h>

#include <cmath>

#include "nagntk/data.h"
#include "nagntk/errors.h"
#include "nagntk/linalg.h"
#include "support/temp_dir.h"

namespace nagntk {
namespace {

using testing::TempDir;

TEST(LoadCsv, NormalizesRows) {
  TempDir dir;
  const auto p = dir.write("d.csv", "a,b,label\n3,4,1\n1,0,0\n");
  const Dataset ds = load_csv(p, {.label_column = -1, .mode = LabelMode::kClassification});
  ASSERT_EQ(ds.n(), 2u);
  ASSERT_EQ(ds.d(), 2u);
  EXPECT_NEAR(ds.features()(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(ds.features()(0, 1), 0.8, 1e-15);
}

TEST(LoadCsv, PositiveClassMapsToPlusOne) {
  TempDir dir;
  const auto p = dir.write("d.csv", "3,1,0\n2,0,1\n7,1,1\n5,1,2\n");
  CsvOptions opts{.label_column = 0, .mode = LabelMode::kClassification, .positive_class = 3};
  const Dataset ds = load_csv(p, opts);
  EXPECT_EQ(ds.labels(), (Vector{1.0, -1.0, -1.0, -1.0}));
  EXPECT_EQ(ds.d(), 2u);
}

TEST(LoadCsv, DuplicateRowsAreRejectedWithPairs) {
  TempDir dir;
  // (1, 2) and (2, 4) coincide after normalization.
  const auto p = dir.write("d.csv", "1,2,1\n0,1,1\n2,4,0\n");
  try {
    load_csv(p, {});
    FAIL() << "expected DistinctnessError";
  } catch (const DistinctnessError& e) {
    ASSERT_EQ(e.pairs().size(), 1u);
    EXPECT_EQ(e.pairs()[0], (std::pair<std::size_t, std::size_t>{0, 2}));
  }
}

TEST(LoadCsv, ZeroRowIsANormalizationError) {
  TempDir dir;
  const auto p = dir.write("d.csv", "1,2,1\n0,0,1\n");
  EXPECT_THROW(load_csv(p, {}), NormalizationError);
}

TEST(LoadCsv, MalformedInputReportsTheLine) {
  TempDir dir;
  const auto p = dir.write("d.csv", "x,y,l\n1,2,1\n1,zz,0\n");
  try {
    load_csv(p, {});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.row(), 3u);
  }
  EXPECT_THROW(load_csv(dir.write("r.csv", "1,2,1\n1,2\n"), {}), ParseError);
  EXPECT_THROW(load_csv(dir.write("e.csv", "a,b\n"), {}), ParseError);
  EXPECT_THROW(load_csv(dir.write("c.csv", "1,2,1\n"), {.label_column = 5}), ParseError);
}

TEST(LoadCsv, RegressionLabelsAreStandardized) {
  TempDir dir;
  const auto p = dir.write("d.csv", "1,0,1\n0,1,2\n1,1,3\n1,2,6\n");
  const Dataset ds = load_csv(p, {.mode = LabelMode::kRegression});
  double mean = 0.0, sq = 0.0;
  for (double y : ds.labels()) mean += y;
  mean /= 4.0;
  for (double y : ds.labels()) sq += (y - mean) * (y - mean);
  EXPECT_NEAR(mean, 0.0, 1e-15);
  EXPECT_NEAR(sq / 4.0, 1.0, 1e-14);
}

TEST(SaveCsv, RawRoundTripIsExact) {
  TempDir dir;
  const Dataset ds = synthetic(20, 6, 3);
  save_csv(ds, dir / "s.csv");
  const Dataset back = load_csv(dir / "s.csv", {.mode = LabelMode::kRaw});
  // Loading renormalizes rows, so the text round trip is exact against that.
  EXPECT_EQ(back.features(), normalize_rows(ds.features()));
  EXPECT_EQ(back.labels(), ds.labels());
}

TEST(Synthetic, Deterministic) {
  const Dataset a = synthetic(10, 5, 7);
  const Dataset b = synthetic(10, 5, 7);
  EXPECT_EQ(a.features(), b.features());
  EXPECT_EQ(a.labels(), b.labels());
  EXPECT_NE(synthetic(10, 5, 8).features(), a.features());
}

TEST(Synthetic, UnitRowsAndSignLabels) {
  const Dataset ds = synthetic(200, 7, 1);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    EXPECT_NEAR(norm2(ds.features().row(i)), 1.0, 1e-9);
    const double y = ds.labels()[i];
    EXPECT_TRUE(y == 1.0 || y == -1.0);
  }
}

TEST(Dataset, ValidatesInvariants) {
  EXPECT_THROW(Dataset(Matrix{{1.0, 0.0}}, Vector{1.0, 2.0}), DimensionError);
  EXPECT_THROW(Dataset(Matrix{{2.0, 0.0}}, Vector{1.0}), NormalizationError);
  EXPECT_THROW(Dataset(Matrix{{1.0, 0.0}, {1.0, 0.0}}, Vector{1.0, 1.0}), DistinctnessError);
  EXPECT_THROW(Dataset(Matrix{{1.0, 0.0}}, Vector{std::nan("")}), Error);
  const Dataset ok(Matrix{{1.0, 0.0}, {0.0, 1.0}}, Vector{1.0, -1.0});
  EXPECT_EQ(ok.inner_products()(0, 1), 0.0);
  EXPECT_EQ(ok.inner_products()(1, 1), 1.0);
}

TEST(NormalizeRows, ZeroRowThrows) {
  EXPECT_THROW(normalize_rows(Matrix{{0.0, 0.0}}), NormalizationError);
}

}  // namespace
}  // namespace nagntk
