#pragma once

// Shared fixtures and independent oracles for the test suite.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "glbreak/glbreak.hpp"

namespace glbreak::testing {

/// Gaussian regressors and errors; coefficients shift by `shift` at each date.
inline RegressionData random_instance(int T, int p, int q, std::uint64_t seed, const std::vector<int>& dates = {},
                                      double shift = 1.0, double noise = 1.0) {
  Engine engine = make_engine(seed, 0);
  StandardNormal normal;
  Matrix w(T, p), z(T, q);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < p; ++j) w(t, j) = normal(engine);
    for (int j = 0; j < q; ++j) z(t, j) = j == 0 ? 1.0 : normal(engine);
  }
  Vector y(T);
  for (int t = 0; t < T; ++t) {
    double level = 0.0;
    for (int d : dates)
      if (t + 1 > d) level += shift;
    double mean = 0.0;
    for (int j = 0; j < p; ++j) mean += 0.5 * w(t, j);
    for (int j = 0; j < q; ++j) mean += (0.3 + level) * z(t, j);
    y(t) = mean + noise * normal(engine);
  }
  return RegressionData(std::move(y), std::move(w), std::move(z));
}

inline RegressionData step_series(int T, int date, double magnitude, double base = 0.0) {
  Vector y(T);
  for (int t = 0; t < T; ++t) y(t) = base + (t + 1 > date ? magnitude : 0.0);
  return RegressionData::mean_shift(std::move(y));
}

/// SSR at fixed dates from the normal equations in extended precision, with
/// the design assembled row by row.
inline long double naive_ssr(const RegressionData& data, Structure structure, const std::vector<int>& dates) {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  using LVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  const int T = static_cast<int>(data.T());
  const int p = structure == Structure::Pure ? 0 : static_cast<int>(data.p());
  const int q = structure == Structure::Pure ? static_cast<int>(data.p() + data.q()) : static_cast<int>(data.q());
  const int regimes = static_cast<int>(dates.size()) + 1;
  LMatrix x = LMatrix::Zero(T, p + regimes * q);
  LVector y(T);
  for (int t = 0; t < T; ++t) {
    y(t) = data.y()(t);
    int regime = 0;
    while (regime < static_cast<int>(dates.size()) && t + 1 > dates[regime]) ++regime;
    std::vector<long double> zrow;
    if (structure == Structure::Pure) {
      for (Index j = 0; j < data.p(); ++j) zrow.push_back(data.W()(t, j));
    } else {
      for (int j = 0; j < p; ++j) x(t, j) = data.W()(t, j);
    }
    for (Index j = 0; j < data.q(); ++j) zrow.push_back(data.Z()(t, j));
    for (int j = 0; j < q; ++j) x(t, p + regime * q + j) = zrow[j];
  }
  const LMatrix xtx = x.transpose() * x;
  const LVector beta = xtx.ldlt().solve(x.transpose() * y);
  return (y - x * beta).squaredNorm();
}

/// Every admissible date vector for m = 1 or 2.
inline std::vector<std::vector<int>> admissible_partitions(int T, int h, int m) {
  std::vector<std::vector<int>> out;
  if (m == 1) {
    for (int a = h; a <= T - h; ++a) out.push_back({a});
  } else {
    for (int a = h; a <= T - 2 * h; ++a)
      for (int b = a + h; b <= T - h; ++b) out.push_back({a, b});
  }
  return out;
}

/// Exhaustive SSR minimizer through ols_concentrated; skips rank-deficient
/// partitions.
inline SegmentedFit exhaustive_fit(const RegressionData& data, const BreakSpec& spec) {
  const int T = static_cast<int>(data.T());
  SegmentedFit best;
  best.ssr = std::numeric_limits<double>::infinity();
  for (const auto& dates : admissible_partitions(T, spec.min_segment(T), spec.num_breaks)) {
    try {
      auto fit = ols_concentrated(data, spec, dates);
      if (fit.ssr < best.ssr) best = std::move(fit);
    } catch (const Error&) {
    }
  }
  return best;
}

}  // namespace glbreak::testing
