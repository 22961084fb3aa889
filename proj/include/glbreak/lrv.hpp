#pragma once

// Per-regime second moments and long-run covariances of z_t e_t.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/model.hpp"

namespace glbreak {

enum class LrvKind { Plain, NeweyWest, Prewhitened };

struct LrvMethod {
  LrvKind kind = LrvKind::Plain;
  /// Bartlett truncation lag; negative selects floor(4 (n/100)^{2/9}).
  int bandwidth = -1;
  /// Overrides the fitted VAR(1) prewhitening matrix with a * I.
  std::optional<double> forced_ar;

  static LrvMethod plain() { return {}; }
  static LrvMethod newey_west(int bandwidth = -1) { return {LrvKind::NeweyWest, bandwidth, std::nullopt}; }
  static LrvMethod prewhitened(int bandwidth = -1) { return {LrvKind::Prewhitened, bandwidth, std::nullopt}; }
};

inline std::string to_string(LrvKind kind) {
  switch (kind) {
    case LrvKind::Plain: return "plain";
    case LrvKind::NeweyWest: return "newey_west";
    case LrvKind::Prewhitened: return "prewhitened_hac";
  }
  return "plain";
}

/// Largest singular value allowed for the prewhitening VAR(1) matrix.
inline constexpr double kMaxPrewhitenCoefficient = 0.97;

inline int auto_bandwidth(Index n) {
  return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

struct LrvResult {
  Matrix cov;
  bool clipped = false;  // negative eigenvalues were set to zero
  Matrix ar;             // prewhitening matrix (empty unless prewhitened)
};

namespace detail {

/// (1/n) sum_t v_t v_{t-lag}', rows of v are observations. Uncentered.
inline Matrix autocovariance(const Matrix& v, Index lag) {
  const Index n = v.rows();
  if (lag >= n) return Matrix::Zero(v.cols(), v.cols());
  return v.bottomRows(n - lag).transpose() * v.topRows(n - lag) / static_cast<double>(n);
}

inline Matrix bartlett(const Matrix& v, int bandwidth) {
  Matrix out = autocovariance(v, 0);
  for (int k = 1; k <= bandwidth; ++k) {
    const double w = 1.0 - static_cast<double>(k) / (bandwidth + 1.0);
    const Matrix g = autocovariance(v, k);
    out += w * (g + g.transpose());
  }
  return out;
}

inline Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

inline bool clip_psd(Matrix& m) {
  m = symmetrize(m);
  if (m.size() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.eigenvalues().minCoeff() >= 0.0) return false;
  const Vector clipped = eig.eigenvalues().cwiseMax(0.0);
  m = symmetrize(eig.eigenvectors() * clipped.asDiagonal() * eig.eigenvectors().transpose());
  return true;
}

}  // namespace detail

/// Long-run covariance of the rows of v.
inline LrvResult long_run_covariance(const Matrix& v, const LrvMethod& method) {
  const Index n = v.rows();
  const Index k = v.cols();
  if (n < 2) fail(ErrorCode::DegenerateRegime, "need at least two observations for a long-run covariance");
  LrvResult out;
  const int bw = method.bandwidth >= 0 ? method.bandwidth : auto_bandwidth(n);
  switch (method.kind) {
    case LrvKind::Plain:
      out.cov = detail::autocovariance(v, 0);
      break;
    case LrvKind::NeweyWest:
      out.cov = detail::bartlett(v, bw);
      break;
    case LrvKind::Prewhitened: {
      Matrix a;
      if (method.forced_ar) {
        a = *method.forced_ar * Matrix::Identity(k, k);
      } else {
        const Matrix lagged = v.topRows(n - 1);
        const Matrix lead = v.bottomRows(n - 1);
        const Matrix sxx = lagged.transpose() * lagged;
        const Matrix syx = lead.transpose() * lagged;
        a = sxx.transpose().ldlt().solve(syx.transpose()).transpose();
        if (!a.allFinite()) a = Matrix::Zero(k, k);
        Eigen::JacobiSVD<Matrix> svd(a);
        const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
        if (top > kMaxPrewhitenCoefficient) a *= kMaxPrewhitenCoefficient / top;
      }
      // Whitened series; the first observation has no lag and passes through.
      Matrix u = v;
      u.bottomRows(n - 1) -= v.topRows(n - 1) * a.transpose();
      const Matrix omega = detail::bartlett(u, bw);
      const Matrix inv = (Matrix::Identity(k, k) - a).inverse();
      out.cov = inv * omega * inv.transpose();
      out.ar = a;
      break;
    }
  }
  out.clipped = detail::clip_psd(out.cov);
  return out;
}

/// Second moments around one break: regime 1 precedes it, regime 2 follows.
struct RegimeMoments {
  Matrix V1, V2;          // sample E z z'
  Matrix Sigma1, Sigma2;  // long-run covariance of z e
  double sigma2_1 = 0.0, sigma2_2 = 0.0;
  Vector shift;           // estimated delta at the break
  double xi_z = 1.0;      // shift' V2 shift / shift' V1 shift
  double xi_e = 1.0;      // shift' Sigma2 shift / shift' Sigma1 shift
  bool clipped = false;

  /// (shift' V1 shift)^2 / shift' Sigma1 shift: maps standardized limit-law
  /// units to dates.
  double scale_factor() const {
    const double a = shift.dot(V1 * shift);
    const double b = shift.dot(Sigma1 * shift);
    return a * a / b;
  }
};

/// Rows [begin, end) of each regime for the given break dates.
inline std::vector<std::pair<Index, Index>> regime_rows(const std::vector<int>& dates, Index T) {
  std::vector<std::pair<Index, Index>> out;
  Index begin = 0;
  for (int d : dates) {
    out.emplace_back(begin, d);
    begin = d;
  }
  out.emplace_back(begin, T);
  return out;
}

/// One RegimeMoments per break of the fit.
inline std::vector<RegimeMoments> estimate_moments(const RegressionData& data, const BreakSpec& spec,
                                                   const SegmentedFit& fit, const LrvMethod& method) {
  const auto roles = regressor_roles(data, spec.structure);
  const Matrix& z = roles.breaking;
  const Index q = z.cols();
  const auto rows = regime_rows(fit.break_dates, data.T());
  const double scale = std::max(1.0, data.y().cwiseAbs().maxCoeff());

  struct Regime {
    Matrix V, Sigma;
    double sigma2;
    bool clipped;
  };
  std::vector<Regime> regimes;
  for (const auto& [begin, end] : rows) {
    const Index n = end - begin;
    if (n < q + 2) fail(ErrorCode::DegenerateRegime, "regime shorter than q+2 observations");
    const Vector e = fit.residuals.segment(begin, n);
    if (e.maxCoeff() - e.minCoeff() <= 1e-10 * scale)
      fail(ErrorCode::DegenerateRegime, "residuals are constant in regime (" + std::to_string(begin) + ", " + std::to_string(end) + "]");
    const Matrix zr = z.middleRows(begin, n);
    const Matrix ze = zr.array().colwise() * e.array();
    auto lrv = long_run_covariance(ze, method);
    regimes.push_back({zr.transpose() * zr / static_cast<double>(n), lrv.cov, e.squaredNorm() / static_cast<double>(n), lrv.clipped});
  }

  std::vector<RegimeMoments> out;
  for (std::size_t i = 0; i + 1 < regimes.size(); ++i) {
    RegimeMoments m;
    m.V1 = regimes[i].V;
    m.V2 = regimes[i + 1].V;
    m.Sigma1 = regimes[i].Sigma;
    m.Sigma2 = regimes[i + 1].Sigma;
    m.sigma2_1 = regimes[i].sigma2;
    m.sigma2_2 = regimes[i + 1].sigma2;
    m.shift = fit.shift(i);
    m.clipped = regimes[i].clipped || regimes[i + 1].clipped;
    const double v1 = m.shift.dot(m.V1 * m.shift);
    const double s1 = m.shift.dot(m.Sigma1 * m.shift);
    if (!(v1 > 0.0) || !(s1 > 0.0)) fail(ErrorCode::DegenerateRegime, "estimated shift has zero quadratic form");
    m.xi_z = m.shift.dot(m.V2 * m.shift) / v1;
    m.xi_e = m.shift.dot(m.Sigma2 * m.shift) / s1;
    if (!(m.xi_z > 0.0) || !(m.xi_e > 0.0)) fail(ErrorCode::DegenerateRegime, "non-positive regime ratio");
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace glbreak
