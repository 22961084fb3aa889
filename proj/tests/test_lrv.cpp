#include <gtest/gtest.h>

#include "support.hpp"

using namespace glbreak;
using namespace glbreak::testing;

namespace {

Matrix ar1_series(int n, double rho, std::uint64_t seed) {
  Engine engine = make_engine(seed, 0);
  StandardNormal normal;
  Matrix v(n, 1);
  double prev = normal(engine) / std::sqrt(1 - rho * rho);
  for (int t = 0; t < n; ++t) v(t, 0) = prev = rho * prev + normal(engine);
  return v;
}

}  // namespace

TEST(Lrv, AutoBandwidth) {
  EXPECT_EQ(auto_bandwidth(100), 4);
  EXPECT_EQ(auto_bandwidth(50), 3);
  EXPECT_EQ(auto_bandwidth(10000), 11);
}

TEST(Lrv, PlainIsUncenteredSecondMoment) {
  Matrix v(4, 1);
  v << 1, 2, 3, 4;
  EXPECT_DOUBLE_EQ(long_run_covariance(v, LrvMethod::plain()).cov(0, 0), 30.0 / 4.0);
}

TEST(Lrv, BartlettByHand) {
  Matrix v(4, 1);
  v << 1, -1, 2, 0;
  // gamma0 = 6/4, gamma1 = (-1 - 2 + 0)/4, weight 1/2 at lag 1.
  EXPECT_DOUBLE_EQ(long_run_covariance(v, LrvMethod::newey_west(1)).cov(0, 0), 1.5 + 2 * 0.5 * (-0.75));
}

TEST(Lrv, PrewhitenedRecoversAr1LongRunVariance) {
  const auto v = ar1_series(20000, 0.3, 99);
  const auto r = long_run_covariance(v, LrvMethod::prewhitened());
  EXPECT_NEAR(r.cov(0, 0), 1.0 / (0.7 * 0.7), 0.15);
  EXPECT_NEAR(r.ar(0, 0), 0.3, 0.03);
}

TEST(Lrv, PrewhitenedWithZeroArEqualsNeweyWest) {
  const auto v = ar1_series(500, 0.5, 3);
  LrvMethod forced = LrvMethod::prewhitened(6);
  forced.forced_ar = 0.0;
  EXPECT_TRUE(long_run_covariance(v, forced).cov.isApprox(long_run_covariance(v, LrvMethod::newey_west(6)).cov, 1e-14));
  forced.bandwidth = 0;
  EXPECT_TRUE(long_run_covariance(v, forced).cov.isApprox(long_run_covariance(v, LrvMethod::plain()).cov, 1e-14));
}

TEST(Lrv, PrewhitenCoefficientIsClamped) {
  Matrix v(200, 1);
  for (int t = 0; t < 200; ++t) v(t, 0) = 1.0 + 0.001 * t;  // near unit root
  const auto r = long_run_covariance(v, LrvMethod::prewhitened());
  EXPECT_LE(std::abs(r.ar(0, 0)), kMaxPrewhitenCoefficient + 1e-12);
  EXPECT_TRUE(r.cov.allFinite());
}

TEST(Lrv, ScalesQuadratically) {
  const auto v = ar1_series(400, 0.2, 5);
  for (const auto& m : {LrvMethod::plain(), LrvMethod::newey_west(), LrvMethod::prewhitened()}) {
    const double a = long_run_covariance(v, m).cov(0, 0);
    const double b = long_run_covariance(3.0 * v, m).cov(0, 0);
    EXPECT_NEAR(b, 9.0 * a, 1e-10 * b);
  }
}

TEST(Lrv, SymmetricAndPsd) {
  Engine engine = make_engine(8, 0);
  StandardNormal normal;
  Matrix v(300, 3);
  for (Index i = 0; i < v.size(); ++i) v.data()[i] = normal(engine);
  v.col(2) = v.col(0) + 0.01 * v.col(1);
  for (const auto& m : {LrvMethod::plain(), LrvMethod::newey_west(), LrvMethod::prewhitened()}) {
    const auto r = long_run_covariance(v, m);
    EXPECT_LE((r.cov - r.cov.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(r.cov);
    EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-12);
  }
}

TEST(Lrv, ClipPsdRepairsIndefiniteMatrix) {
  Matrix m(2, 2);
  m << 1, 2, 2, 1;
  EXPECT_TRUE(detail::clip_psd(m));
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-14);
  EXPECT_NEAR(m(0, 0), 1.5, 1e-12);
}

TEST(RegimeMoments, IidUnitVariance) {
  Engine engine = make_engine(17, 0);
  StandardNormal normal;
  Vector y(10000);
  for (int t = 0; t < 10000; ++t) y(t) = normal(engine);
  const auto data = RegressionData::mean_shift(y);
  BreakSpec spec;
  const auto fit = ols_concentrated(data, spec, {5000});
  const auto m = estimate_moments(data, spec, fit, LrvMethod::plain()).at(0);
  EXPECT_NEAR(m.Sigma1(0, 0), 1.0, 0.1);
  EXPECT_NEAR(m.Sigma2(0, 0), 1.0, 0.1);
  EXPECT_NEAR(m.V1(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(m.xi_z, 1.0, 0.1);
  EXPECT_NEAR(m.xi_e, 1.0, 0.1);
}

TEST(RegimeMoments, SymmetricTwoRegimeDesign) {
  const auto data = random_instance(20000, 0, 2, 21, {10000}, 0.5);
  BreakSpec spec;
  const auto fit = ols_concentrated(data, spec, {10000});
  const auto m = estimate_moments(data, spec, fit, LrvMethod::newey_west()).at(0);
  EXPECT_NEAR(m.xi_z, 1.0, 0.1);
  EXPECT_NEAR(m.xi_e, 1.0, 0.1);
  EXPECT_GT(m.scale_factor(), 0.0);
}

TEST(RegimeMoments, ErrorScalingKeepsRatio) {
  const auto data = random_instance(2000, 0, 1, 22, {1000}, 0.5);
  const auto scaled = RegressionData::mean_shift(5.0 * data.y());
  BreakSpec spec;
  const auto a = estimate_moments(data, spec, ols_concentrated(data, spec, {1000}), LrvMethod::plain()).at(0);
  const auto b = estimate_moments(scaled, spec, ols_concentrated(scaled, spec, {1000}), LrvMethod::plain()).at(0);
  EXPECT_NEAR(b.Sigma1(0, 0), 25.0 * a.Sigma1(0, 0), 1e-9 * b.Sigma1(0, 0));
  EXPECT_NEAR(a.xi_e, b.xi_e, 1e-9);
}

TEST(RegimeMoments, DegenerateRegime) {
  const auto data = step_series(100, 50, 1.0);
  BreakSpec spec;
  const auto fit = ols_concentrated(data, spec, {50});
  try {
    estimate_moments(data, spec, fit, LrvMethod::plain());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DegenerateRegime);
  }
}

TEST(RegimeMoments, OnePerBreak) {
  const auto data = random_instance(90, 0, 1, 23, {30, 60}, 1.0);
  BreakSpec spec;
  spec.num_breaks = 2;
  const auto fit = ols_concentrated(data, spec, {30, 60});
  const auto moments = estimate_moments(data, spec, fit, LrvMethod::plain());
  ASSERT_EQ(moments.size(), 2u);
  EXPECT_TRUE(moments[0].Sigma2.isApprox(moments[1].Sigma1));
}
