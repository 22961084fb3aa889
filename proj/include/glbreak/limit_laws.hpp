#pragma once

// Simulated limit laws of the break-date estimators.
//
// Both laws are functionals of the standardized two-sided process
//
//   V(s) = W1(-s) - |s|/2                   for s <= 0,
//   V(s) = sqrt(xi_e) W2(s) - xi_z s/2      for s > 0,
//
// discretized on the grid s = k * step, |k| <= half_width / step. The argmax
// law is the distribution of argmax V; the Bayes-ratio law is the minimizer of
// the expected loss under weights proportional to exp(kappa V(u)).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/loss.hpp"
#include "glbreak/model.hpp"
#include "glbreak/random.hpp"
#include "glbreak/supwald.hpp"

namespace glbreak {

struct WienerGrid {
  double step = 0.05;
  double half_width = 30.0;
  int max_doublings = 3;

  int points_per_side() const { return static_cast<int>(std::llround(half_width / step)); }
  double point(int index) const { return (index - points_per_side()) * step; }
};

enum class LimitLaw { ArgmaxVstar, BayesRatio };

inline std::string to_string(LimitLaw law) { return law == LimitLaw::ArgmaxVstar ? "argmax" : "bayes"; }

struct LimitLawSample {
  std::vector<double> draws;  // standardized units, path order
  LimitLaw law = LimitLaw::ArgmaxVstar;
  LossSpec loss = LossSpec::squared();
  double xi_e = 1.0;
  double xi_z = 1.0;
  double kappa = 1.0;
  WienerGrid grid;  // grid actually used, after any doubling
  std::uint64_t seed = 0;
  double scale_factor = 1.0;
  double interior_fraction = 1.0;
  double non_integrable_fraction = 0.0;
  bool non_integrable = false;

  std::size_t size() const noexcept { return draws.size(); }
};

/// Minimum share of paths whose argmax must lie strictly inside the grid.
inline constexpr double kMinInteriorFraction = 0.999;
/// Per-path tail mass beyond the grid above which a path counts as truncated.
inline constexpr double kMaxTailMass = 1e-4;
/// Share of truncated paths above which the grid is widened.
inline constexpr double kMaxTruncatedFraction = 0.001;

namespace detail {

/// Fills v (size 2N+1) with one path of V on the grid.
inline void simulate_path(std::vector<double>& v, const WienerGrid& grid, double xi_e, double xi_z, std::uint64_t path_seed) {
  const int n = grid.points_per_side();
  v.assign(static_cast<std::size_t>(2 * n + 1), 0.0);
  const double sd = std::sqrt(grid.step);
  const double right_sd = sd * std::sqrt(xi_e);
  StandardNormal normal;
  // Separate streams per side so that widening the grid extends each path.
  Engine left = make_engine(path_seed, 0);
  Engine right = make_engine(path_seed, 1);
  double w = 0.0;
  for (int k = 1; k <= n; ++k) {
    w += sd * normal(left);
    v[static_cast<std::size_t>(n - k)] = w - 0.5 * k * grid.step;
  }
  w = 0.0;
  for (int k = 1; k <= n; ++k) {
    w += right_sd * normal(right);
    v[static_cast<std::size_t>(n + k)] = w - 0.5 * xi_z * k * grid.step;
  }
}

inline std::size_t first_argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

inline void check_law_inputs(double xi_e, double xi_z, std::size_t paths, const WienerGrid& grid) {
  if (!(xi_e > 0.0) || !(xi_z > 0.0) || !std::isfinite(xi_e) || !std::isfinite(xi_z))
    fail(ErrorCode::InvalidArgument, "xi_e and xi_z must be positive");
  if (paths == 0) fail(ErrorCode::InvalidArgument, "n_paths must be positive");
  if (!(grid.step > 0.0) || !(grid.half_width > grid.step)) fail(ErrorCode::InvalidArgument, "invalid Wiener grid");
}

}  // namespace detail

/// Loss minimizer against normalized exp(kappa v) weights on the grid. Ties in
/// the weighted quantiles go to the earlier grid point.
inline double bayes_ratio_draw(const std::vector<double>& v, const WienerGrid& grid, const LossSpec& loss, double kappa) {
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> w(v.size());
  double total = 0.0;
  for (std::size_t k = 0; k < v.size(); ++k) total += (w[k] = std::exp(kappa * (v[k] - top)));
  const auto quantile = [&](double prob) {
    double cum = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) {
      cum += w[k] / total;
      if (cum >= prob - 1e-12) return grid.point(static_cast<int>(k));
    }
    return grid.point(static_cast<int>(w.size()) - 1);
  };
  switch (loss.kind) {
    case LossKind::Squared: {
      double mean = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) mean += w[k] * grid.point(static_cast<int>(k));
      return mean / total;
    }
    case LossKind::Absolute: return quantile(0.5);
    case LossKind::Check: return quantile(loss.tau);
    case LossKind::Polynomial: break;
  }
  fail(ErrorCode::InvalidArgument, "Bayes-ratio law supports squared, absolute and check losses");
}

/// Draws from the argmax law, widening the grid until the argmax is interior
/// in at least 99.9% of paths.
inline LimitLawSample simulate_argmax_vstar(double xi_e, double xi_z, std::size_t n_paths, WienerGrid grid,
                                            std::uint64_t seed, unsigned threads = 1) {
  detail::check_law_inputs(xi_e, xi_z, n_paths, grid);
  LimitLawSample out;
  out.law = LimitLaw::ArgmaxVstar;
  out.xi_e = xi_e;
  out.xi_z = xi_z;
  out.seed = seed;
  for (int attempt = 0;; ++attempt) {
    std::vector<double> draws(n_paths);
    std::vector<char> interior(n_paths);
    const int last = 2 * grid.points_per_side();
    parallel_for(n_paths, threads, [&](std::size_t path) {
      std::vector<double> v;
      detail::simulate_path(v, grid, xi_e, xi_z, split_seed(seed, path));
      const auto k = detail::first_argmax(v);
      draws[path] = grid.point(static_cast<int>(k));
      interior[path] = k != 0 && static_cast<int>(k) != last;
    });
    const double share = static_cast<double>(std::count(interior.begin(), interior.end(), 1)) / static_cast<double>(n_paths);
    if (share >= kMinInteriorFraction) {
      out.draws = std::move(draws);
      out.grid = grid;
      out.interior_fraction = share;
      return out;
    }
    if (attempt >= grid.max_doublings)
      fail(ErrorCode::GridTooSmall, "argmax interior in only " + std::to_string(share) + " of paths at half-width " +
                                        std::to_string(grid.half_width));
    grid.half_width *= 2.0;
  }
}

/// Draws from the Bayes-ratio law. Paths whose mass beyond the grid exceeds
/// 1e-4 count as truncated; the grid is widened while more than 0.1% of paths
/// are truncated, after which the sample is flagged non-integrable.
inline LimitLawSample simulate_bayes_ratio(const LossSpec& loss, double xi_e, double xi_z, std::size_t n_paths,
                                           WienerGrid grid, double kappa, std::uint64_t seed, unsigned threads = 1) {
  detail::check_law_inputs(xi_e, xi_z, n_paths, grid);
  if (!(kappa > 0.0) || !std::isfinite(kappa)) fail(ErrorCode::InvalidArgument, "kappa must be positive");
  if (loss.kind == LossKind::Polynomial)
    fail(ErrorCode::InvalidArgument, "Bayes-ratio law supports squared, absolute and check losses");
  LimitLawSample out;
  out.law = LimitLaw::BayesRatio;
  out.loss = loss;
  out.xi_e = xi_e;
  out.xi_z = xi_z;
  out.kappa = kappa;
  out.seed = seed;
  for (int attempt = 0;; ++attempt) {
    std::vector<double> draws(n_paths);
    std::vector<char> truncated(n_paths);
    parallel_for(n_paths, threads, [&](std::size_t path) {
      std::vector<double> v;
      detail::simulate_path(v, grid, xi_e, xi_z, split_seed(seed, path));
      draws[path] = bayes_ratio_draw(v, grid, loss, kappa);
      // Tail beyond each edge approximated by the drift alone.
      const double top = *std::max_element(v.begin(), v.end());
      double mass = 0.0;
      for (double x : v) mass += std::exp(kappa * (x - top));
      mass *= grid.step;
      const double tail = std::exp(kappa * (v.front() - top)) / (0.5 * kappa) +
                          std::exp(kappa * (v.back() - top)) / (0.5 * kappa * xi_z);
      truncated[path] = tail > kMaxTailMass * mass;
    });
    const double share = static_cast<double>(std::count(truncated.begin(), truncated.end(), 1)) / static_cast<double>(n_paths);
    if (share <= kMaxTruncatedFraction || attempt >= grid.max_doublings) {
      out.draws = std::move(draws);
      out.grid = grid;
      out.non_integrable_fraction = share;
      out.non_integrable = share > kMaxTruncatedFraction;
      return out;
    }
    grid.half_width *= 2.0;
  }
}

/// Type-7 empirical quantiles of the draws.
inline std::vector<double> quantiles(const LimitLawSample& sample, const std::vector<double>& probs) {
  if (sample.draws.empty()) fail(ErrorCode::EmptySample, "quantiles of an empty sample");
  std::vector<double> sorted = sample.draws;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> out;
  out.reserve(probs.size());
  for (double p : probs) {
    if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::InvalidArgument, "quantile probability must lie in (0, 1)");
    out.push_back(sorted_quantile(sorted, p));
  }
  return out;
}

/// The same draws with the sign flipped.
inline LimitLawSample reflected(LimitLawSample sample) {
  for (double& d : sample.draws) d = -d;
  return sample;
}

/// Strictly positive prior over break dates.
struct PriorDensity {
  std::vector<int> support;
  std::vector<double> pmf;
  double floor = 0.0;

  std::size_t size() const noexcept { return support.size(); }
};

inline PriorDensity uniform_prior(const std::vector<int>& support) {
  if (support.empty()) fail(ErrorCode::InvalidArgument, "empty prior support");
  PriorDensity out;
  out.support = support;
  out.pmf.assign(support.size(), 1.0 / static_cast<double>(support.size()));
  return out;
}

inline std::vector<int> band_dates(DateBand band) {
  std::vector<int> out;
  for (int d = band.first; d <= band.last; ++d) out.push_back(d);
  return out;
}

/// Relative floor on every support date before renormalization.
inline constexpr double kPriorFloor = 1e-6;

/// Histogram of center + round(draw / scale) over the band. Draws landing
/// outside the band are dropped; every date then gets at least
/// 1e-6 / |band| before renormalization. A sample with no draw inside the
/// band yields the uniform prior.
inline PriorDensity prior_from_sample(const LimitLawSample& sample, int center_date, double scale_factor, Index T,
                                      DateBand band) {
  if (!(scale_factor > 0.0) || !std::isfinite(scale_factor)) fail(ErrorCode::DegenerateScale, "prior scale factor must be positive");
  band.first = std::max(band.first, 1);
  band.last = std::min<int>(band.last, static_cast<int>(T));
  if (band.size() == 0) fail(ErrorCode::InvalidArgument, "empty prior band");
  const auto n = static_cast<std::size_t>(band.size());
  std::vector<double> counts(n, 0.0);
  double inside = 0.0;
  for (double draw : sample.draws) {
    const double offset = std::round(draw / scale_factor);  // half away from zero
    if (!(std::abs(offset) < 1e9)) continue;
    const int date = center_date + static_cast<int>(offset);
    if (!band.contains(date)) continue;
    counts[static_cast<std::size_t>(date - band.first)] += 1.0;
    inside += 1.0;
  }
  PriorDensity out;
  out.support = band_dates(band);
  out.floor = kPriorFloor / static_cast<double>(n);
  out.pmf.resize(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double p = inside > 0.0 ? counts[j] / inside : 1.0 / static_cast<double>(n);
    total += (out.pmf[j] = std::max(p, out.floor));
  }
  for (double& p : out.pmf) p /= total;
  return out;
}

inline void write_sample_csv(std::ostream& out, const LimitLawSample& sample) {
  out << "draw\n";
  out.precision(17);
  for (double d : sample.draws) out << d << '\n';
}

inline void write_density_csv(std::ostream& out, const std::vector<int>& dates, const std::vector<double>& probs) {
  out << "date,prob\n";
  out.precision(17);
  for (std::size_t j = 0; j < dates.size(); ++j) out << dates[j] << ',' << probs[j] << '\n';
}

}  // namespace glbreak
