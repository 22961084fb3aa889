#pragma once

// Asymptotic critical values of the sup-Wald test for a single break:
// sup over lambda in [eps, 1-eps] of BB_q(lambda)'BB_q(lambda) / (lambda(1-lambda)),
// with BB_q a q-dimensional Brownian bridge.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/random.hpp"

namespace glbreak {

struct SupWaldCriticalValue {
  int q;
  double trimming;
  double alpha;
  double value;
};

}  // namespace glbreak

// Generated by tools/gen_supwald_table; defines kSupWaldTableSeed,
// kSupWaldTableGrid, kSupWaldTablePaths and kSupWaldTable.
#include "glbreak/detail/supwald_table.inc"

namespace glbreak {

/// Type-7 empirical quantile of sorted data.
inline double sorted_quantile(const std::vector<double>& sorted, double prob) {
  if (sorted.empty()) fail(ErrorCode::EmptySample, "quantile of an empty sample");
  const double h = (static_cast<double>(sorted.size()) - 1.0) * prob;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

/// Simulated sup statistics, one sorted vector per trimming fraction.
inline std::vector<std::vector<double>> simulate_sup_wald_null(int q, const std::vector<double>& trimmings, int grid_points,
                                                               int paths, std::uint64_t seed, unsigned threads = 1) {
  if (q < 1 || grid_points < 10 || paths < 1) fail(ErrorCode::InvalidArgument, "invalid sup-Wald simulation size");
  std::vector<std::vector<double>> sups(trimmings.size(), std::vector<double>(static_cast<std::size_t>(paths)));
  const double step_sd = std::sqrt(1.0 / grid_points);
  parallel_for(static_cast<std::size_t>(paths), threads, [&](std::size_t path) {
    Engine engine = make_engine(seed, path);
    StandardNormal normal;
    std::vector<double> walk(static_cast<std::size_t>(grid_points + 1) * q, 0.0);
    for (int k = 1; k <= grid_points; ++k)
      for (int j = 0; j < q; ++j)
        walk[static_cast<std::size_t>(k) * q + j] = walk[static_cast<std::size_t>(k - 1) * q + j] + step_sd * normal(engine);
    const double* end = &walk[static_cast<std::size_t>(grid_points) * q];
    for (std::size_t r = 0; r < trimmings.size(); ++r) {
      const int first = static_cast<int>(std::ceil(trimmings[r] * grid_points - 1e-9));
      const int last = grid_points - first;
      double best = 0.0;
      for (int k = first; k <= last; ++k) {
        const double lambda = static_cast<double>(k) / grid_points;
        double norm2 = 0.0;
        for (int j = 0; j < q; ++j) {
          const double bb = walk[static_cast<std::size_t>(k) * q + j] - lambda * end[j];
          norm2 += bb * bb;
        }
        best = std::max(best, norm2 / (lambda * (1.0 - lambda)));
      }
      sups[r][path] = best;
    }
  });
  for (auto& s : sups) std::sort(s.begin(), s.end());
  return sups;
}

inline std::optional<double> find_sup_wald_critical_value(int q, double trimming, double alpha) {
  for (const auto& e : kSupWaldTable)
    if (e.q == q && std::abs(e.trimming - trimming) < 1e-9 && std::abs(e.alpha - alpha) < 1e-9) return e.value;
  return std::nullopt;
}

/// Tabulated critical value; InvalidArgument when (q, eps, alpha) is not tabulated.
inline double sup_wald_critical_value(int q, double trimming, double alpha) {
  if (const auto v = find_sup_wald_critical_value(q, trimming, alpha)) return *v;
  fail(ErrorCode::InvalidArgument, "no tabulated sup-Wald critical value for q=" + std::to_string(q) +
                                       ", eps=" + std::to_string(trimming) + ", alpha=" + std::to_string(alpha));
}

}  // namespace glbreak
