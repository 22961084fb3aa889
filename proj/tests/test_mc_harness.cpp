#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace glbreak;

namespace {

double lag1_correlation(const Vector& x) {
  const double m = x.mean();
  double num = 0.0, den = 0.0;
  for (Index t = 0; t < x.size(); ++t) {
    den += (x(t) - m) * (x(t) - m);
    if (t > 0) num += (x(t) - m) * (x(t - 1) - m);
  }
  return num / den;
}

HarnessOptions quick_options(int reps, bool coverage) {
  HarnessOptions o;
  o.reps = reps;
  o.seed = 2024;
  o.law_paths = 2000;
  o.coverage = coverage;
  return o;
}

}  // namespace

TEST(Dgp, NoiselessM1) {
  auto spec = DgpSpec::make(DgpModel::M1, 0.3, 0.8);
  spec.sigma2 = 0.0;
  const auto sim = generate(spec, 1);
  EXPECT_EQ(sim.truth.break_dates, std::vector<int>{30});
  for (int t = 0; t < 100; ++t) EXPECT_DOUBLE_EQ(sim.data.y()(t), t < 30 ? 1.0 : 1.8);
  EXPECT_EQ(sim.data.p(), 0);
  EXPECT_EQ(sim.data.q(), 1);
}

TEST(Dgp, M2ErrorAutocorrelation) {
  const auto sim = generate(DgpSpec::make(DgpModel::M2, 0.5, 1.0, 50000), 2);
  EXPECT_NEAR(lag1_correlation(sim.truth.errors), 0.3, 0.02);
  EXPECT_NEAR(sim.truth.errors.squaredNorm() / 50000.0, 1.0 / 0.91, 0.05);
}

TEST(Dgp, M3Stationarity) {
  const auto sim = generate(DgpSpec::make(DgpModel::M3, 0.5, 0.0, 50000), 3);
  const Vector& y = sim.data.y();
  EXPECT_NEAR(y.mean(), 0.0, 0.03);
  EXPECT_NEAR(lag1_correlation(y), 0.6, 0.02);
  EXPECT_NEAR((y.array() - y.mean()).square().mean(), 0.5 / 0.64, 0.05);
  ASSERT_EQ(sim.data.p(), 1);
  for (Index t = 1; t < 100; ++t) EXPECT_EQ(sim.data.W()(t, 0), y(t - 1));
}

TEST(Dgp, Deterministic) {
  const auto a = generate(DgpSpec::make(DgpModel::M2, 0.3, 0.4), 9);
  const auto b = generate(DgpSpec::make(DgpModel::M2, 0.3, 0.4), 9);
  const auto c = generate(DgpSpec::make(DgpModel::M2, 0.3, 0.4), 10);
  EXPECT_EQ(a.data.y(), b.data.y());
  EXPECT_NE(a.data.y(), c.data.y());
  EXPECT_THROW(generate(DgpSpec::make(DgpModel::M1, 1.0, 1.0), 1), Error);
}

TEST(Harness, LrvChoice) {
  EXPECT_EQ(lrv_for(DgpModel::M1).kind, LrvMethod::plain().kind);
  EXPECT_EQ(lrv_for(DgpModel::M2).kind, LrvMethod::prewhitened().kind);
  EXPECT_EQ(lrv_for(DgpModel::M3).kind, LrvMethod::plain().kind);
}

TEST(Harness, TableDesigns) {
  for (int table = 1; table <= 6; ++table) EXPECT_EQ(table_cells(table).size(), 8u);
  EXPECT_EQ(table_cells(3).front().model, DgpModel::M3);
  EXPECT_DOUBLE_EQ(table_cells(4).front().delta0, 0.4);
  EXPECT_THROW(table_cells(7), Error);
  EXPECT_THROW(run_table(1, quick_options(50, false)), Error);
}

TEST(Harness, CellIsDeterministicAcrossThreads) {
  const auto dgp = DgpSpec::make(DgpModel::M1, 0.5, 0.8);
  auto options = quick_options(20, true);
  LimitLawCache c1(options.law_paths, options.grid, 5);
  const auto a = run_cell(dgp, 77, options, c1);
  options.threads = 3;
  LimitLawCache c2(options.law_paths, options.grid, 5);
  const auto b = run_cell(dgp, 77, options, c2);
  ASSERT_EQ(a.reps.size(), b.reps.size());
  for (std::size_t i = 0; i < a.reps.size(); ++i) {
    EXPECT_EQ(a.reps[i].gl_ln, b.reps[i].gl_ln);
    EXPECT_EQ(a.reps[i].hdr_length, b.reps[i].hdr_length);
    EXPECT_EQ(a.reps[i].bai_length, b.reps[i].bai_length);
    EXPECT_EQ(a.reps[i].supw_reject, b.reps[i].supw_reject);
  }
  EXPECT_EQ(a.value("GL-LN", "Cov"), b.value("GL-LN", "Cov"));
}

TEST(Harness, CacheIsOrderIndependent) {
  LimitLawCache a(500, WienerGrid{}, 1), b(500, WienerGrid{}, 1);
  const auto x1 = a.get(1.0, 2.0);
  a.get(0.5, 0.5);
  b.get(0.5, 0.5);
  const auto x2 = b.get(1.01, 1.99);  // same key
  EXPECT_EQ(x1.draws, x2.draws);
  EXPECT_EQ(a.size(), 2u);
}

TEST(Harness, AccuracyImprovesWithBreakSize) {
  const auto options = quick_options(200, false);
  LimitLawCache cache(options.law_paths, options.grid, 1);
  const auto small = run_cell(DgpSpec::make(DgpModel::M1, 0.5, 0.3), 1, options, cache);
  const auto large = run_cell(DgpSpec::make(DgpModel::M1, 0.5, 1.0), 1, options, cache);
  for (const char* method : {"OLS", "GL-LN", "GL-Uni"}) EXPECT_LT(large.value(method, "MAE"), small.value(method, "MAE"));
  EXPECT_EQ(small.value("all", "failures"), 0.0);
  EXPECT_NE(small.find("OLS", "RMSE"), nullptr);
  EXPECT_EQ(small.find("GL-LN", "Cov"), nullptr);
}

TEST(Harness, CoverageRows) {
  const auto options = quick_options(100, true);
  LimitLawCache cache(options.law_paths, options.grid, 2);
  const auto cell = run_cell(DgpSpec::make(DgpModel::M1, 0.5, 1.6), 4, options, cache);
  EXPECT_GT(cell.value("Bai", "Cov"), 0.85);
  EXPECT_GT(cell.value("sup-W", "Rej"), 0.9);
  EXPECT_GE(cell.value("Bai", "Lgth"), 1.0);
  const auto* row = cell.find("GL-LN", "Cov");
  ASSERT_NE(row, nullptr);
  EXPECT_GT(row->mc_se, 0.0);
  EXPECT_EQ(row->n_reps, 100);
}

TEST(Harness, Csv) {
  const auto options = quick_options(3, true);
  LimitLawCache cache(options.law_paths, options.grid, 2);
  const std::vector<CellResult> cells{run_cell(DgpSpec::make(DgpModel::M3, 0.3, 1.2), 4, options, cache)};
  std::ostringstream metrics, reps;
  write_metrics_csv(metrics, cells);
  write_replications_csv(reps, cells);
  EXPECT_EQ(metrics.str().substr(0, metrics.str().find('\n')), "model,lambda0,delta0,method,metric,value,mc_se,n_reps,seed");
  EXPECT_NE(metrics.str().find("M3,0.3,1.2,GL-LN,Cov"), std::string::npos);
  const std::string text = reps.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
}

TEST(Harness, PairedTest) {
  std::vector<double> x, y;
  for (int i = 0; i < 200; ++i) {
    x.push_back(i % 7);
    y.push_back(i % 7 + 1.0 + (i % 3) * 0.1);
  }
  const auto t = paired_less(x, y);
  EXPECT_LT(t.mean_diff, 0.0);
  EXPECT_LT(t.p_value, 1e-6);
  const auto same = paired_less(x, x);
  EXPECT_DOUBLE_EQ(same.mean_diff, 0.0);
  EXPECT_GE(same.p_value, 0.5);
}
