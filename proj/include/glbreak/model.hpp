#pragma once

// Linear regression with structural change in a subset of coefficients:
//
//   y_t = w_t' phi + z_t' delta_j + e_t,   T_{j-1} < t <= T_j,
//
// with T_0 = 0 and T_{m+1} = T. Regime j is left-closed at its break date:
// observation t = T_b belongs to the regime that ends at T_b. Dates are
// 1-based throughout the public interface.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "glbreak/errors.hpp"

namespace glbreak {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Condition-number threshold on per-segment Gram matrices.
inline constexpr double kMaxGramCondition = 1e10;

/// Observed series with common regressors W (T x p, may be empty) and
/// break-affected regressors Z (T x q). No implicit intercept.
class RegressionData {
 public:
  RegressionData(Vector y, Matrix W, Matrix Z) : y_(std::move(y)), W_(std::move(W)), Z_(std::move(Z)) {
    const Index T = y_.size();
    if (W_.cols() == 0) W_.resize(T, 0);
    if (Z_.cols() < 1) fail(ErrorCode::InvalidData, "at least one break-affected regressor is required");
    if (W_.rows() != T || Z_.rows() != T) fail(ErrorCode::InvalidData, "regressor row count differs from length of y");
    if (T < 2 * (p() + q()) + 2)
      fail(ErrorCode::InvalidData, "sample too short: T=" + std::to_string(T) + " < 2(p+q)+2");
    if (!y_.allFinite() || !W_.allFinite() || !Z_.allFinite()) fail(ErrorCode::InvalidData, "non-finite value");
    for (Index c = 0; c < W_.cols(); ++c)
      if (W_.col(c).cwiseAbs().maxCoeff() == 0.0) fail(ErrorCode::InvalidData, "column w" + std::to_string(c + 1) + " is identically zero");
    for (Index c = 0; c < Z_.cols(); ++c)
      if (Z_.col(c).cwiseAbs().maxCoeff() == 0.0) fail(ErrorCode::InvalidData, "column z" + std::to_string(c + 1) + " is identically zero");
  }

  /// Mean-shift data: Z is a column of ones, W empty.
  static RegressionData mean_shift(Vector y) {
    const Index T = y.size();
    return RegressionData(std::move(y), Matrix(T, 0), Matrix::Ones(T, 1));
  }

  const Vector& y() const noexcept { return y_; }
  const Matrix& W() const noexcept { return W_; }
  const Matrix& Z() const noexcept { return Z_; }
  Index T() const noexcept { return y_.size(); }
  Index p() const noexcept { return W_.cols(); }
  Index q() const noexcept { return Z_.cols(); }

  /// X = [W Z].
  Matrix X() const {
    Matrix x(T(), p() + q());
    x << W_, Z_;
    return x;
  }

 private:
  Vector y_;
  Matrix W_;
  Matrix Z_;
};

/// Partial change keeps W common to all regimes (D = (0, I)'); pure change
/// lets every coefficient shift (D = I), folding W into the break-affected set.
enum class Structure { Partial, Pure };

struct BreakSpec {
  int num_breaks = 1;
  double trimming = 0.15;
  Structure structure = Structure::Partial;

  /// Minimum segment length floor(eps * T).
  int min_segment(Index T) const { return static_cast<int>(std::floor(trimming * static_cast<double>(T) + 1e-9)); }
};

/// Admissible break dates [first, last] for a single break.
struct DateBand {
  int first = 0;
  int last = -1;
  int size() const noexcept { return last >= first ? last - first + 1 : 0; }
  bool contains(int d) const noexcept { return d >= first && d <= last; }
};

inline DateBand admissible_band(Index T, const BreakSpec& spec) {
  const int h = spec.min_segment(T);
  return {h, static_cast<int>(T) - h};
}

/// Regressors split by role under a structure.
struct RegressorRoles {
  Matrix common;    // T x p_eff
  Matrix breaking;  // T x q_eff
};

inline RegressorRoles regressor_roles(const RegressionData& data, Structure structure) {
  if (structure == Structure::Pure) return {Matrix(data.T(), 0), data.X()};
  return {data.W(), data.Z()};
}

inline void validate_spec(const RegressionData& data, const BreakSpec& spec) {
  if (spec.num_breaks < 1) fail(ErrorCode::InvalidArgument, "num_breaks must be >= 1");
  if (!(spec.trimming > 0.0 && spec.trimming < 0.5)) fail(ErrorCode::InvalidArgument, "trimming must lie in (0, 0.5)");
  const int h = spec.min_segment(data.T());
  if (h < data.p() + data.q())
    fail(ErrorCode::InvalidArgument,
         "floor(eps*T)=" + std::to_string(h) + " is smaller than p+q=" + std::to_string(data.p() + data.q()));
}

/// Largest over smallest eigenvalue; infinite when the matrix is singular.
inline double gram_condition(const Matrix& gram) {
  if (gram.size() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

inline void check_dates(Index T, const BreakSpec& spec, const std::vector<int>& dates) {
  const int h = spec.min_segment(T);
  if (dates.empty()) fail(ErrorCode::InadmissibleDates, "no break dates given");
  int prev = 0;
  for (int d : dates) {
    if (d - prev < h || d <= prev)
      fail(ErrorCode::InadmissibleDates, "segment ending at " + std::to_string(d) + " is shorter than " + std::to_string(h));
    prev = d;
  }
  if (static_cast<int>(T) - prev < h || prev >= T)
    fail(ErrorCode::InadmissibleDates, "last segment is shorter than " + std::to_string(h));
}

/// Block-partitioned design of a given segmentation.
struct PartitionedDesign {
  Matrix X;                           // [W Z], unchanged
  Matrix common;                      // common regressors under the structure
  std::vector<Matrix> regime_blocks;  // Z_1..Z_{m+1}, zero outside their regime
  std::vector<int> dates;

  Matrix full() const {
    Index cols = common.cols();
    for (const auto& b : regime_blocks) cols += b.cols();
    Matrix out(X.rows(), cols);
    Index c = 0;
    out.leftCols(common.cols()) = common;
    c += common.cols();
    for (const auto& b : regime_blocks) {
      out.middleCols(c, b.cols()) = b;
      c += b.cols();
    }
    return out;
  }
};

inline PartitionedDesign build_design(const RegressionData& data, const BreakSpec& spec, const std::vector<int>& dates) {
  validate_spec(data, spec);
  check_dates(data.T(), spec, dates);
  const auto roles = regressor_roles(data, spec.structure);
  const Index T = data.T();
  const Index q = roles.breaking.cols();

  PartitionedDesign design;
  design.X = data.X();
  design.common = roles.common;
  design.dates = dates;
  int begin = 0;
  for (std::size_t j = 0; j <= dates.size(); ++j) {
    const int end = j < dates.size() ? dates[j] : static_cast<int>(T);
    Matrix block = Matrix::Zero(T, q);
    block.middleRows(begin, end - begin) = roles.breaking.middleRows(begin, end - begin);
    const Matrix gram = roles.breaking.middleRows(begin, end - begin).transpose() * roles.breaking.middleRows(begin, end - begin);
    if (gram_condition(gram) > kMaxGramCondition)
      fail(ErrorCode::RankDeficient, "Z'Z of segment (" + std::to_string(begin) + ", " + std::to_string(end) + "] is singular");
    design.regime_blocks.push_back(std::move(block));
    begin = end;
  }
  return design;
}

/// Least-squares fit at fixed break dates.
struct SegmentedFit {
  std::vector<int> break_dates;
  Vector phi_hat;                  // common coefficients (length p_eff)
  std::vector<Vector> delta_hat;   // per-regime coefficients (m+1 vectors of length q_eff)
  Vector residuals;
  double ssr = 0.0;
  /// SSR of the no-break fit minus ssr. For one break this is
  /// delta_hat' (Z2' M Z2) delta_hat.
  double criterion_value = 0.0;

  /// delta_{i+1} - delta_i, the shift at break i (0-based).
  Vector shift(std::size_t i) const { return delta_hat.at(i + 1) - delta_hat.at(i); }
  int num_breaks() const noexcept { return static_cast<int>(break_dates.size()); }
};

namespace detail {

struct LeastSquares {
  Vector coef;
  Vector residuals;
  double ssr = 0.0;
  Index rank = 0;
};

inline LeastSquares least_squares(const Matrix& design, const Vector& y) {
  Eigen::ColPivHouseholderQR<Matrix> qr(design);
  LeastSquares out;
  out.rank = qr.rank();
  out.coef = qr.solve(y);
  out.residuals = y - design * out.coef;
  out.ssr = out.residuals.squaredNorm();
  return out;
}

}  // namespace detail

/// SSR of the fit without any break, y on X = [W Z].
inline double no_break_ssr(const RegressionData& data) { return detail::least_squares(data.X(), data.y()).ssr; }

inline SegmentedFit ols_concentrated(const RegressionData& data, const BreakSpec& spec, const std::vector<int>& dates) {
  const PartitionedDesign design = build_design(data, spec, dates);
  const Matrix full = design.full();
  const auto ls = detail::least_squares(full, data.y());
  if (ls.rank < full.cols()) fail(ErrorCode::RankDeficient, "segmented design is rank deficient");

  SegmentedFit fit;
  fit.break_dates = dates;
  const Index pe = design.common.cols();
  const Index qe = design.regime_blocks.front().cols();
  fit.phi_hat = ls.coef.head(pe);
  for (std::size_t j = 0; j < design.regime_blocks.size(); ++j)
    fit.delta_hat.push_back(ls.coef.segment(pe + static_cast<Index>(j) * qe, qe));
  fit.residuals = ls.residuals;
  fit.ssr = ls.ssr;
  fit.criterion_value = no_break_ssr(data) - ls.ssr;
  return fit;
}

/// Simulation-side truth. Shrinkage convention v_T is the identity: the
/// simulated shift is delta0 at every T.
struct TrueDgp {
  std::vector<double> lambda0;
  std::vector<double> delta0;
  std::vector<int> break_dates;  // floor(T * lambda0)
  Vector errors;                 // e_t, for criterion decompositions
};

inline int true_break_date(Index T, double lambda0) {
  return static_cast<int>(std::floor(static_cast<double>(T) * lambda0 + 1e-9));
}

}  // namespace glbreak
