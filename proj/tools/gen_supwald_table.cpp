// Regenerates include/glbreak/detail/supwald_table.inc.
//
//   gen_supwald_table [--max-q 5] [--grid 10000] [--paths 100000] [--seed N] > supwald_table.inc

#include <cstdio>
#include <vector>

#include <CLI11.hpp>

#include "glbreak/supwald.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulate sup-Wald critical values"};
  int max_q = 5;
  int grid = 10000;
  int paths = 100000;
  std::uint64_t seed = 19930701;
  unsigned threads = 1;
  app.add_option("--max-q", max_q);
  app.add_option("--grid", grid);
  app.add_option("--paths", paths);
  app.add_option("--seed", seed);
  app.add_option("--threads", threads);
  CLI11_PARSE(app, argc, argv);

  const std::vector<double> trims{0.05, 0.10, 0.15, 0.20, 0.25};
  const std::vector<double> alphas{0.10, 0.05, 0.025, 0.01};
  std::printf("// Generated by tools/gen_supwald_table. Do not edit.\n");
  std::printf("// grid=%d paths=%d seed=%llu\n#pragma once\n\n#include <array>\n#include <cstdint>\n\nnamespace glbreak {\n\n",
              grid, paths, static_cast<unsigned long long>(seed));
  std::printf("inline constexpr std::uint64_t kSupWaldTableSeed = %lluULL;\n", static_cast<unsigned long long>(seed));
  std::printf("inline constexpr int kSupWaldTableGrid = %d;\ninline constexpr int kSupWaldTablePaths = %d;\n\n", grid, paths);
  std::printf("inline constexpr std::array<SupWaldCriticalValue, %zu> kSupWaldTable{{\n",
              static_cast<std::size_t>(max_q) * trims.size() * alphas.size());
  for (int q = 1; q <= max_q; ++q) {
    const auto sups = glbreak::simulate_sup_wald_null(q, trims, grid, paths, glbreak::split_seed(seed, q), threads);
    for (std::size_t r = 0; r < trims.size(); ++r)
      for (double a : alphas)
        std::printf("    {%d, %.2f, %.3f, %.4f},\n", q, trims[r], a, glbreak::sorted_quantile(sups[r], 1.0 - a));
    std::fflush(stdout);
    std::fprintf(stderr, "q=%d done\n", q);
  }
  std::printf("}};\n\n}  // namespace glbreak\n");
}
