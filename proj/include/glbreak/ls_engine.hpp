#pragma once

// Least-squares break-date machinery: the criterion profile over admissible
// dates, exact multiple-break segmentation by dynamic programming, and the
// sup-Wald test.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/lrv.hpp"
#include "glbreak/model.hpp"
#include "glbreak/supwald.hpp"

namespace glbreak {

/// Q_T(delta_hat(T_b), T_b) over the admissible dates.
struct CriterionProfile {
  std::vector<int> dates;
  std::vector<double> q_values;
  std::vector<double> ssr_values;
  std::vector<Vector> delta_hats;  // LS shift estimate at each date
  int argmax_date = 0;
  Vector delta_hat_at_argmax;
  double delta_norm_sq = 0.0;
  double restricted_ssr = 0.0;  // SSR without the profiled break
  int T = 0;

  std::size_t argmax_index() const {
    return static_cast<std::size_t>(std::find(dates.begin(), dates.end(), argmax_date) - dates.begin());
  }
  std::size_t size() const noexcept { return dates.size(); }
};

namespace detail {

/// Relative tolerance below which criterion values count as tied.
inline constexpr double kTieTolerance = 1e-12;

inline double tie_tolerance(const Vector& y) { return kTieTolerance * y.squaredNorm(); }

/// Profiles one break over candidate dates inside the window (lo, hi] with
/// `base` projected out. `breaking` holds the regressors whose coefficients
/// shift; the candidate block is breaking * 1{d < t <= hi}. Dates whose
/// segment or partialled Gram matrix is singular are skipped.
inline CriterionProfile profile_window(const Vector& y, const Matrix& base, const Matrix& breaking, int lo, int hi,
                                       DateBand band) {
  const Index q = breaking.cols();
  const Index k = base.cols();

  const auto restricted = least_squares(base, y);
  const Vector& e0 = restricted.residuals;
  const Matrix xtx = base.transpose() * base;
  const Eigen::LDLT<Matrix> xtx_ldlt(xtx);

  CriterionProfile profile;
  profile.restricted_ssr = restricted.ssr;
  profile.T = static_cast<int>(y.size());

  // Suffix sums over (d, hi] and prefix Gram sums over (lo, d].
  const int width = hi - lo;
  std::vector<Matrix> suffix_zz(static_cast<std::size_t>(width + 1), Matrix::Zero(q, q));
  std::vector<Matrix> suffix_zx(static_cast<std::size_t>(width + 1), Matrix::Zero(q, k));
  std::vector<Vector> suffix_ze(static_cast<std::size_t>(width + 1), Vector::Zero(q));
  for (int d = hi - 1; d >= lo; --d) {
    const auto i = static_cast<std::size_t>(d - lo);
    const Vector z = breaking.row(d).transpose();
    suffix_zz[i] = suffix_zz[i + 1] + z * z.transpose();
    suffix_zx[i] = suffix_zx[i + 1] + z * base.row(d);
    suffix_ze[i] = suffix_ze[i + 1] + z * e0(d);
  }
  const Matrix& total_zz = suffix_zz[0];

  for (int d = std::max(band.first, lo + 1); d <= std::min(band.last, hi - 1); ++d) {
    const auto i = static_cast<std::size_t>(d - lo);
    const Matrix& post_zz = suffix_zz[i];
    const Matrix pre_zz = total_zz - post_zz;
    if (gram_condition(pre_zz) > kMaxGramCondition || gram_condition(post_zz) > kMaxGramCondition) continue;

    Matrix a = post_zz;
    if (k > 0) a -= suffix_zx[i] * xtx_ldlt.solve(suffix_zx[i].transpose());
    a = 0.5 * (a + a.transpose());
    if (gram_condition(a) > kMaxGramCondition) continue;
    const Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) continue;

    const Vector& g = suffix_ze[i];
    const Vector whitened = llt.matrixL().solve(g);
    const double qv = whitened.squaredNorm();
    profile.dates.push_back(d);
    profile.q_values.push_back(qv);
    profile.ssr_values.push_back(restricted.ssr - qv);
    profile.delta_hats.push_back(llt.solve(g));
  }

  if (profile.dates.empty()) fail(ErrorCode::EmptyProfile, "no admissible date with a full-rank design");

  // Earliest date attaining the maximum, up to rounding.
  const double best = *std::max_element(profile.q_values.begin(), profile.q_values.end());
  const double tol = tie_tolerance(y);
  for (std::size_t j = 0; j < profile.dates.size(); ++j) {
    if (profile.q_values[j] >= best - tol) {
      profile.argmax_date = profile.dates[j];
      profile.delta_hat_at_argmax = profile.delta_hats[j];
      profile.delta_norm_sq = profile.delta_hats[j].squaredNorm();
      break;
    }
  }
  return profile;
}

}  // namespace detail

/// Criterion profile of a single break over the admissible band.
inline CriterionProfile profile_single(const RegressionData& data, const BreakSpec& spec) {
  validate_spec(data, spec);
  const auto band = admissible_band(data.T(), spec);
  if (band.size() == 0) fail(ErrorCode::EmptyProfile, "admissible band is empty");
  const auto roles = regressor_roles(data, spec.structure);
  return detail::profile_window(data.y(), data.X(), roles.breaking, 0, static_cast<int>(data.T()), band);
}

/// Profile of break `index` (0-based) with the other breaks held at `dates`.
/// Candidates lie between the neighbouring breaks, at least floor(eps T)
/// away from each. For a single break this is profile_single.
inline CriterionProfile profile_conditional(const RegressionData& data, const BreakSpec& spec, const std::vector<int>& dates,
                                            std::size_t index) {
  validate_spec(data, spec);
  if (index >= dates.size()) fail(ErrorCode::InvalidArgument, "break index out of range");
  if (dates.size() == 1) return profile_single(data, spec);
  check_dates(data.T(), spec, dates);

  const auto roles = regressor_roles(data, spec.structure);
  const Index T = data.T();
  const Index q = roles.breaking.cols();
  const int h = spec.min_segment(T);
  const int lo = index == 0 ? 0 : dates[index - 1];
  const int hi = index + 1 == dates.size() ? static_cast<int>(T) : dates[index + 1];

  // Base: common regressors plus one Z block per regime, with the two regimes
  // around break `index` merged.
  std::vector<int> others;
  for (std::size_t j = 0; j < dates.size(); ++j)
    if (j != index) others.push_back(dates[j]);
  const auto rows = regime_rows(others, T);
  Matrix base = Matrix::Zero(T, roles.common.cols() + static_cast<Index>(rows.size()) * q);
  base.leftCols(roles.common.cols()) = roles.common;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    const auto [b, e] = rows[j];
    base.block(b, roles.common.cols() + static_cast<Index>(j) * q, e - b, q) = roles.breaking.middleRows(b, e - b);
  }
  return detail::profile_window(data.y(), base, roles.breaking, lo, hi, DateBand{lo + h, hi - h});
}

/// Writes `date,q_value,ssr`.
inline void write_profile_csv(std::ostream& out, const CriterionProfile& profile) {
  out << "date,q_value,ssr\n";
  out.precision(17);
  for (std::size_t j = 0; j < profile.size(); ++j)
    out << profile.dates[j] << ',' << profile.q_values[j] << ',' << profile.ssr_values[j] << '\n';
}

/// Deterministic and stochastic parts of Q_T(T_b) - Q_T(T_b0) given the true
/// single-break shift `delta` at `true_date` and the true errors.
struct CriterionDecomposition {
  std::vector<int> dates;
  std::vector<double> g_d;
  std::vector<double> g_e;
};

inline CriterionDecomposition decompose_criterion(const RegressionData& data, const BreakSpec& spec, int true_date,
                                                  const Vector& delta, const Vector& errors) {
  validate_spec(data, spec);
  const auto roles = regressor_roles(data, spec.structure);
  const Matrix x = data.X();
  const Eigen::ColPivHouseholderQR<Matrix> qr(x);
  const auto annihilate = [&](const Matrix& m) -> Matrix { return m - x * qr.solve(m); };
  const Index T = data.T();
  const auto shifted = [&](int d) {
    Matrix z = roles.breaking;
    z.topRows(d).setZero();
    return z;
  };

  const Matrix mz0 = annihilate(shifted(true_date));
  const Vector me = annihilate(errors);
  const Matrix z0mz0 = mz0.transpose() * mz0;
  const Vector z0me = mz0.transpose() * me;
  const double e_proj0 = z0me.dot(z0mz0.ldlt().solve(z0me));

  CriterionDecomposition out;
  const auto band = admissible_band(T, spec);
  for (int d = band.first; d <= band.last; ++d) {
    const Matrix mz2 = annihilate(shifted(d));
    const Matrix a = mz2.transpose() * mz2;
    const Eigen::LDLT<Matrix> ldlt(a);
    const Matrix z0mz2 = mz0.transpose() * mz2;
    const Vector z2me = mz2.transpose() * me;
    const Vector cross = z0mz2 * ldlt.solve(z2me);
    out.dates.push_back(d);
    out.g_d.push_back(delta.dot(z0mz2 * ldlt.solve(z0mz2.transpose() * delta)) - delta.dot(z0mz0 * delta));
    out.g_e.push_back(2.0 * delta.dot(cross) - 2.0 * delta.dot(z0me) + z2me.dot(ldlt.solve(z2me)) - e_proj0);
  }
  return out;
}

/// Optimal SSR of k+1 segments covering observations 1..j, with backtracking.
struct SegmentationTable {
  int T = 0;
  int min_length = 0;
  int max_breaks = 0;
  /// cost[k][j]: best SSR of k+1 segments over 1..j (infinity if infeasible).
  std::vector<std::vector<double>> cost;
  /// last_break[k][j]: end of segment k in the optimum for cell (k, j).
  std::vector<std::vector<int>> last_break;

  std::vector<int> backtrack(int breaks) const {
    std::vector<int> dates(static_cast<std::size_t>(breaks));
    int end = T;
    for (int k = breaks; k >= 1; --k) {
      end = last_break[static_cast<std::size_t>(k)][static_cast<std::size_t>(end)];
      dates[static_cast<std::size_t>(k - 1)] = end;
    }
    return dates;
  }
};

namespace detail {

/// SSR of every segment [i, j] (1-based, inclusive) with length >= h,
/// computed by recursive least squares as the segment end advances.
class SegmentSsr {
 public:
  SegmentSsr(const Vector& y, const Matrix& z, int h) : T_(static_cast<int>(y.size())), h_(h) {
    const Index q = z.cols();
    table_.resize(static_cast<std::size_t>(T_));
    for (int start = 0; start + h <= T_; ++start) {
      auto& row = table_[static_cast<std::size_t>(start)];
      row.assign(static_cast<std::size_t>(T_ - start), std::numeric_limits<double>::infinity());
      bool ready = false;
      Matrix p;
      Vector beta;
      double ssr = 0.0;
      for (int end = start + h; end <= T_; ++end) {  // rows [start, end)
        if (!ready) {
          const Matrix zs = z.middleRows(start, end - start);
          const Matrix gram = zs.transpose() * zs;
          if (gram_condition(gram) > kMaxGramCondition) continue;
          const Eigen::LDLT<Matrix> ldlt(gram);
          p = ldlt.solve(Matrix::Identity(q, q));
          beta = ldlt.solve(zs.transpose() * y.segment(start, end - start));
          ssr = (y.segment(start, end - start) - zs * beta).squaredNorm();
          ready = true;
        } else {
          const Vector x = z.row(end - 1).transpose();
          const Vector px = p * x;
          const double f = 1.0 + x.dot(px);
          const double innovation = y(end - 1) - x.dot(beta);
          ssr += innovation * innovation / f;
          beta += px * (innovation / f);
          p -= px * px.transpose() / f;
        }
        row[static_cast<std::size_t>(end - 1 - start)] = ssr;
      }
    }
  }

  /// SSR of observations first..last (1-based, inclusive).
  double operator()(int first, int last) const {
    return table_[static_cast<std::size_t>(first - 1)][static_cast<std::size_t>(last - first)];
  }

 private:
  int T_;
  int h_;
  std::vector<std::vector<double>> table_;
};

inline SegmentationTable segment_dp(const SegmentSsr& seg, int T, int h, int m, double tol) {
  const double inf = std::numeric_limits<double>::infinity();
  SegmentationTable table;
  table.T = T;
  table.min_length = h;
  table.max_breaks = m;
  table.cost.assign(static_cast<std::size_t>(m + 1), std::vector<double>(static_cast<std::size_t>(T + 1), inf));
  table.last_break.assign(static_cast<std::size_t>(m + 1), std::vector<int>(static_cast<std::size_t>(T + 1), -1));
  for (int j = h; j <= T; ++j) table.cost[0][static_cast<std::size_t>(j)] = seg(1, j);
  for (int k = 1; k <= m; ++k) {
    for (int j = (k + 1) * h; j <= T; ++j) {
      double best = inf;
      int arg = -1;
      for (int i = k * h; i <= j - h; ++i) {
        const double prev = table.cost[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)];
        const double val = prev + seg(i + 1, j);
        if (val < best - tol || (arg < 0 && val < inf)) {
          best = val;
          arg = i;
        }
      }
      table.cost[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = best;
      table.last_break[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] = arg;
    }
  }
  return table;
}

}  // namespace detail

/// DP table for y on the breaking regressors (no common regressors).
inline SegmentationTable build_segmentation_table(const Vector& y, const Matrix& breaking, int min_length, int max_breaks) {
  const int T = static_cast<int>(y.size());
  if ((max_breaks + 1) * min_length > T)
    fail(ErrorCode::InfeasibleSegmentation, std::to_string(max_breaks) + " breaks with minimum segment " +
                                                std::to_string(min_length) + " do not fit in T=" + std::to_string(T));
  const detail::SegmentSsr seg(y, breaking, min_length);
  return detail::segment_dp(seg, T, min_length, max_breaks, detail::tie_tolerance(y));
}

namespace detail {

/// Branch-and-bound over segmentations when common regressors are present.
/// Each segment contributes the moments of y and W after projecting out the
/// breaking regressors; a partition's SSR is yy - wy' ww^+ wy over the summed
/// moments. The bound for a prefix adds the optimal cost of the remaining
/// segments with every regressor breaking.
class CommonCoefficientSearch {
 public:
  CommonCoefficientSearch(const Vector& y, const Matrix& common, const Matrix& breaking, int h, int m)
      : y_(y), w_(common), z_(breaking), T_(static_cast<int>(y.size())), h_(h), m_(m), p_(common.cols()) {
    moments_.resize(static_cast<std::size_t>(T_));
    build_suffix_bound();
  }

  /// Searches for a partition with SSR below `upper`; returns the best found.
  std::optional<std::vector<int>> improve(double upper, double tol) {
    best_ = upper;
    tol_ = tol;
    found_.reset();
    dates_.clear();
    descend(0, 0.0, Vector::Zero(p_), Matrix::Zero(p_, p_), 0);
    return found_;
  }

 private:
  struct Moments {
    bool admissible = false;
    double yy = 0.0;
    Vector wy;
    Matrix ww;
  };

  // Rows first..last, 1-based inclusive.
  const Moments& moments(int first, int last) {
    auto& row = moments_[static_cast<std::size_t>(first - 1)];
    if (row.empty()) row.resize(static_cast<std::size_t>(T_ - first + 1));
    auto& slot = row[static_cast<std::size_t>(last - first)];
    if (slot) return *slot;
    Moments out;
    const Index n = last - first + 1;
    const Matrix zs = z_.middleRows(first - 1, n);
    const Matrix gram = zs.transpose() * zs;
    if (gram_condition(gram) <= kMaxGramCondition) {
      const Eigen::LDLT<Matrix> ldlt(gram);
      const Vector ys = y_.segment(first - 1, n);
      const Matrix ws = w_.middleRows(first - 1, n);
      const Vector ry = ys - zs * ldlt.solve(zs.transpose() * ys);
      const Matrix rw = ws - zs * ldlt.solve(zs.transpose() * ws);
      out.admissible = true;
      out.yy = ry.squaredNorm();
      out.wy = rw.transpose() * ry;
      out.ww = rw.transpose() * rw;
    }
    slot = std::move(out);
    return *slot;
  }

  // suffix_[k][i]: lower bound on k+1 segments covering i..T.
  void build_suffix_bound() {
    Matrix both(T_, z_.cols() + p_);
    both << z_, w_;
    const SegmentSsr seg(y_, both, h_);
    const auto cost = [&](int i, int j) {
      const double v = seg(i, j);
      return std::isfinite(v) ? v : 0.0;
    };
    const double inf = std::numeric_limits<double>::infinity();
    suffix_.assign(static_cast<std::size_t>(m_ + 1), std::vector<double>(static_cast<std::size_t>(T_ + 2), inf));
    for (int i = 1; i + h_ - 1 <= T_; ++i) suffix_[0][static_cast<std::size_t>(i)] = cost(i, T_);
    for (int k = 1; k <= m_; ++k)
      for (int i = 1; i + (k + 1) * h_ - 1 <= T_; ++i) {
        double best = inf;
        for (int j = i + h_ - 1; j + k * h_ <= T_; ++j)
          best = std::min(best, cost(i, j) + suffix_[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j + 1)]);
        suffix_[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = best;
      }
  }

  static double concentrated(double yy, const Vector& wy, const Matrix& ww, bool* full_rank) {
    const Eigen::CompleteOrthogonalDecomposition<Matrix> cod(ww);
    if (full_rank) *full_rank = cod.rank() == ww.cols();
    return std::max(0.0, yy - wy.dot(cod.solve(wy)));
  }

  // `placed` segments cover 1..end.
  void descend(int placed, double yy, const Vector& wy, const Matrix& ww, int end) {
    const int remaining = m_ + 1 - placed;
    if (remaining == 0) {
      bool full_rank = false;
      const double ssr = concentrated(yy, wy, ww, &full_rank);
      if (full_rank && ssr < best_ - tol_) {
        best_ = ssr;
        found_ = dates_;
      }
      return;
    }
    if (placed > 0) {
      const double bound = concentrated(yy, wy, ww, nullptr) + suffix_[static_cast<std::size_t>(remaining - 1)][static_cast<std::size_t>(end + 1)];
      if (bound >= best_ - tol_) return;
    }
    const int first = end + 1;
    const int lo = remaining == 1 ? T_ : end + h_;
    const int hi = T_ - (remaining - 1) * h_;
    for (int last = lo; last <= hi; ++last) {
      const Moments& seg = moments(first, last);
      if (!seg.admissible) continue;
      if (remaining > 1) dates_.push_back(last);
      descend(placed + 1, yy + seg.yy, wy + seg.wy, ww + seg.ww, last);
      if (remaining > 1) dates_.pop_back();
    }
  }

  const Vector& y_;
  const Matrix& w_;
  const Matrix& z_;
  int T_, h_, m_;
  Index p_;
  std::vector<std::vector<std::optional<Moments>>> moments_;
  std::vector<std::vector<double>> suffix_;
  std::vector<int> dates_;
  std::optional<std::vector<int>> found_;
  double best_ = 0.0;
  double tol_ = 0.0;
};

}  // namespace detail

/// Global SSR minimizer over admissible m-break segmentations.
///
/// Without common regressors the DP is exact. With common regressors under
/// partial change, alternating updates of the common coefficients and the DP
/// give a starting partition that a branch-and-bound search then improves to
/// the global optimum.
inline SegmentedFit fit_multiple(const RegressionData& data, const BreakSpec& spec) {
  validate_spec(data, spec);
  const Index T = data.T();
  const int h = spec.min_segment(T);
  const int m = spec.num_breaks;
  if ((m + 1) * h > T)
    fail(ErrorCode::InfeasibleSegmentation, std::to_string(m) + " breaks with minimum segment " + std::to_string(h) +
                                                " do not fit in T=" + std::to_string(T));
  const auto roles = regressor_roles(data, spec.structure);

  const auto segment = [&](const Vector& target) {
    const auto table = build_segmentation_table(target, roles.breaking, h, m);
    if (!std::isfinite(table.cost[static_cast<std::size_t>(m)][static_cast<std::size_t>(T)]))
      fail(ErrorCode::InfeasibleSegmentation, "no full-rank segmentation exists");
    return table.backtrack(m);
  };

  if (roles.common.cols() == 0) return ols_concentrated(data, spec, segment(data.y()));

  Vector phi = detail::least_squares(data.X(), data.y()).coef.head(roles.common.cols());
  std::vector<int> dates;
  std::optional<SegmentedFit> start;
  for (int iter = 0; iter < 100; ++iter) {
    const auto next = segment(data.y() - roles.common * phi);
    if (next == dates) break;
    dates = next;
    try {
      start = ols_concentrated(data, spec, dates);
    } catch (const Error&) {
      break;
    }
    phi = start->phi_hat;
  }

  detail::CommonCoefficientSearch search(data.y(), roles.common, roles.breaking, h, m);
  const double upper = start ? start->ssr : std::numeric_limits<double>::infinity();
  const auto better = search.improve(upper, detail::tie_tolerance(data.y()));
  if (better) {
    try {
      return ols_concentrated(data, spec, *better);
    } catch (const Error&) {
    }
  }
  if (!start) fail(ErrorCode::InfeasibleSegmentation, "no full-rank segmentation exists");
  return *start;
}

/// Result of the sup-Wald test.
struct SupWaldResult {
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  int argmax_date = 0;
  double alpha = 0.05;
};

/// Cap applied when the Wald variance is degenerate (noise-free data).
inline constexpr double kWaldCap = 1e300;
/// Variance of the shift estimate below which the data count as noise-free,
/// relative to the squared scale of y.
inline constexpr double kNoiseFloor = 1e-24;

/// Wald statistic for delta_hat(T_b) at each admissible date, with a
/// regime-wise long-run variance of r_t e_t, r_t = [x_t, z_t 1{t > T_b}].
inline std::vector<double> wald_profile(const RegressionData& data, const BreakSpec& spec, const LrvMethod& lrv,
                                        std::vector<int>* dates_out = nullptr) {
  validate_spec(data, spec);
  const auto roles = regressor_roles(data, spec.structure);
  const Matrix x = data.X();
  const Index T = data.T();
  const Index k = x.cols();
  const Index q = roles.breaking.cols();
  const auto band = admissible_band(T, spec);
  const double y_scale = std::max(1.0, data.y().cwiseAbs().maxCoeff());
  std::vector<double> stats;
  for (int d = band.first; d <= band.last; ++d) {
    Matrix r(T, k + q);
    r.leftCols(k) = x;
    r.rightCols(q) = roles.breaking;
    r.block(0, k, d, q).setZero();
    const Matrix rtr = r.transpose() * r;
    if (gram_condition(rtr) > kMaxGramCondition) continue;
    const Eigen::LDLT<Matrix> ldlt(rtr);
    const Vector beta = ldlt.solve(r.transpose() * data.y());
    const Vector e = data.y() - r * beta;
    Matrix meat = Matrix::Zero(k + q, k + q);
    for (const auto& [b, end] : regime_rows({d}, T)) {
      const Matrix v = r.middleRows(b, end - b).array().colwise() * e.segment(b, end - b).array();
      meat += static_cast<double>(end - b) * long_run_covariance(v, lrv).cov;
    }
    const Matrix bread = ldlt.solve(Matrix::Identity(k + q, k + q));
    const Matrix cov = (bread * meat * bread).bottomRightCorner(q, q);
    const Vector delta = beta.tail(q);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov + cov.transpose()));
    const double top = eig.eigenvalues().maxCoeff();
    double stat;
    if (!(top > kNoiseFloor * y_scale * y_scale) || !(eig.eigenvalues().minCoeff() > 1e-12 * top)) {
      // Residual variance at rounding level: the shift is either exact or absent.
      stat = delta.cwiseAbs().maxCoeff() > 1e-8 * y_scale ? kWaldCap : 0.0;
    } else {
      const Vector coord = eig.eigenvectors().transpose() * delta;
      stat = std::min(kWaldCap, coord.cwiseAbs2().cwiseQuotient(eig.eigenvalues()).sum());
      if (!std::isfinite(stat)) stat = kWaldCap;
    }
    stats.push_back(stat);
    if (dates_out) dates_out->push_back(d);
  }
  if (stats.empty()) fail(ErrorCode::EmptyProfile, "no admissible date for the Wald statistic");
  return stats;
}

/// Statistic and maximizing date only; the critical value is left NaN.
inline SupWaldResult sup_wald_statistic(const RegressionData& data, const BreakSpec& spec, const LrvMethod& lrv) {
  if (spec.num_breaks != 1) fail(ErrorCode::InvalidArgument, "sup-Wald test is for a single break");
  std::vector<int> dates;
  const auto stats = wald_profile(data, spec, lrv, &dates);
  const auto it = std::max_element(stats.begin(), stats.end());
  SupWaldResult out;
  out.statistic = *it;
  out.argmax_date = dates[static_cast<std::size_t>(it - stats.begin())];
  out.critical_value = std::numeric_limits<double>::quiet_NaN();
  return out;
}

inline SupWaldResult sup_wald(const RegressionData& data, const BreakSpec& spec, const LrvMethod& lrv, double alpha = 0.05) {
  auto out = sup_wald_statistic(data, spec, lrv);
  const int q = static_cast<int>(regressor_roles(data, spec.structure).breaking.cols());
  out.alpha = alpha;
  out.critical_value = sup_wald_critical_value(q, spec.trimming, alpha);
  out.reject = out.statistic > out.critical_value;
  return out;
}

}  // namespace glbreak
