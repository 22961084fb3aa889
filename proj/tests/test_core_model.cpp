#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace glbreak;
using namespace glbreak::testing;

TEST(RegressionData, RejectsInvalidInput) {
  Vector y = Vector::Ones(3);
  try {
    RegressionData(y, Matrix(3, 0), Matrix::Ones(3, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidData);
  }
  Vector bad = Vector::Ones(10);
  bad(3) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(RegressionData::mean_shift(bad), Error);
  Matrix w = Matrix::Zero(10, 1);
  EXPECT_THROW(RegressionData(Vector::Ones(10), w, Matrix::Ones(10, 1)), Error);
  EXPECT_THROW(RegressionData(Vector::Ones(10), Matrix(10, 0), Matrix(10, 0)), Error);
}

TEST(BuildDesign, IndicatorPartition) {
  const auto data = RegressionData::mean_shift(Vector::LinSpaced(10, 1, 10));
  BreakSpec spec;
  spec.trimming = 0.1;
  const auto d = build_design(data, spec, {5});
  ASSERT_EQ(d.regime_blocks.size(), 2u);
  for (int t = 0; t < 10; ++t) {
    EXPECT_EQ(d.regime_blocks[0](t, 0), t < 5 ? 1.0 : 0.0);
    EXPECT_EQ(d.regime_blocks[1](t, 0), t < 5 ? 0.0 : 1.0);
  }
  EXPECT_EQ(d.X.cols(), 1);
}

TEST(BuildDesign, PureStructureFoldsCommonRegressors) {
  const auto data = random_instance(40, 1, 1, 3);
  BreakSpec spec;
  spec.structure = Structure::Pure;
  const auto d = build_design(data, spec, {20});
  EXPECT_EQ(d.common.cols(), 0);
  EXPECT_EQ(d.regime_blocks[0].cols(), 2);
}

TEST(BuildDesign, BandBoundary) {
  // floor(0.15 * 10) = 1, so the band is [1, 9]; date 3 is admissible.
  const auto data = RegressionData::mean_shift(Vector::LinSpaced(10, 0, 1));
  BreakSpec spec;
  const auto band = admissible_band(10, spec);
  EXPECT_EQ(band.first, 1);
  EXPECT_EQ(band.last, 9);
  EXPECT_NO_THROW(build_design(data, spec, {3}));
}

TEST(BuildDesign, Errors) {
  const auto data = RegressionData::mean_shift(Vector::LinSpaced(20, 0, 1));
  BreakSpec spec;
  spec.trimming = 0.2;  // h = 4
  try {
    build_design(data, spec, {2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InadmissibleDates);
  }
  EXPECT_THROW(build_design(data, spec, {10, 8}), Error);
  Matrix z = Matrix::Ones(20, 2);
  for (int t = 10; t < 20; ++t) z(t, 1) = 2.0;  // collinear before t = 10
  const RegressionData collinear(Vector::LinSpaced(20, 0, 1), Matrix(20, 0), z);
  try {
    build_design(collinear, spec, {8});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RankDeficient);
  }
}

TEST(OlsConcentrated, NoiselessStep) {
  const auto data = step_series(100, 50, 1.0);
  BreakSpec spec;
  const auto fit = ols_concentrated(data, spec, {50});
  EXPECT_NEAR(fit.ssr, 0.0, 1e-20);
  EXPECT_NEAR(fit.shift(0)(0), 1.0, 1e-12);
  EXPECT_GT(ols_concentrated(data, spec, {40}).ssr, 0.1);
}

TEST(OlsConcentrated, MatchesNaiveOracle) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    for (auto structure : {Structure::Partial, Structure::Pure}) {
      const int p = static_cast<int>(seed % 3);
      const auto data = random_instance(30, p, 1 + static_cast<int>(seed % 2), seed, {12}, 0.8);
      BreakSpec spec;
      spec.trimming = 0.2;
      spec.structure = structure;
      const auto fit = ols_concentrated(data, spec, {13});
      const double oracle = static_cast<double>(naive_ssr(data, structure, {13}));
      EXPECT_NEAR(fit.ssr, oracle, 1e-10 * std::max(1.0, oracle)) << "seed " << seed;
      // Residuals reproduce the SSR.
      EXPECT_NEAR(fit.residuals.squaredNorm(), fit.ssr, 1e-8 * fit.ssr);
    }
  }
}

TEST(OlsConcentrated, CriterionIsQuadraticFormOfShift) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto data = random_instance(40, 1, 1, seed, {20}, 0.7);
    BreakSpec spec;
    const auto fit = ols_concentrated(data, spec, {17});
    const Matrix x = data.X();
    Matrix z2 = data.Z();
    z2.topRows(17).setZero();
    const Matrix mz2 = z2 - x * x.colPivHouseholderQr().solve(z2);
    // Shift in the parameterization Z delta + Z2 shift.
    const double q = fit.shift(0).dot((mz2.transpose() * mz2) * fit.shift(0));
    EXPECT_NEAR(fit.criterion_value, q, 1e-9 * std::max(1.0, q));
  }
}

TEST(OlsConcentrated, PureEqualsPartialWithoutCommonRegressors) {
  const auto data = random_instance(40, 0, 2, 11, {18});
  BreakSpec partial, pure;
  pure.structure = Structure::Pure;
  const auto a = ols_concentrated(data, partial, {18});
  const auto b = ols_concentrated(data, pure, {18});
  EXPECT_DOUBLE_EQ(a.ssr, b.ssr);
  EXPECT_TRUE(a.delta_hat[1].isApprox(b.delta_hat[1], 1e-12));
}

TEST(TrueDgp, BreakDate) {
  EXPECT_EQ(true_break_date(100, 0.3), 30);
  EXPECT_EQ(true_break_date(100, 0.5), 50);
  EXPECT_EQ(true_break_date(7, 0.5), 3);
}

TEST(Csv, RoundTripAndErrors) {
  const auto data = random_instance(12, 1, 2, 5);
  std::stringstream ss;
  write_regression_csv(ss, data);
  const auto back = read_regression_csv(ss);
  EXPECT_EQ(back.p(), 1);
  EXPECT_EQ(back.q(), 2);
  EXPECT_TRUE(back.y().isApprox(data.y(), 0));
  EXPECT_TRUE(back.Z().isApprox(data.Z(), 0));

  std::istringstream bad("y,z1\n1,1\n2,1\nfoo,1\n");
  try {
    read_regression_csv(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidData);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
  std::istringstream ragged("y,z1\n1,1,3\n");
  EXPECT_THROW(read_regression_csv(ragged), Error);
  std::istringstream header("x,z1\n1,1\n");
  EXPECT_THROW(read_regression_csv(header), Error);
}
