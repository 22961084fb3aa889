#pragma once

// Monte Carlo harness for the simulation designs M1-M3.
//
//   y_t = a y_{t-1} + beta + delta 1{t > T_b} + e_t,  T = 100.
//
// M1: a = 0, beta = 1, e iid N(0, 1).
// M2: as M1 with e_t = 0.3 e_{t-1} + u_t, u iid N(0, 1), stationary start.
// M3: a = 0.6 with y_{t-1} as a common regressor, beta = 0, e iid N(0, 0.5),
//     stationary start followed by a 200-observation burn-in.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/inference.hpp"
#include "glbreak/limit_laws.hpp"
#include "glbreak/model.hpp"
#include "glbreak/random.hpp"

namespace glbreak {

enum class DgpModel { M1, M2, M3 };

inline std::string to_string(DgpModel m) {
  switch (m) {
    case DgpModel::M1: return "M1";
    case DgpModel::M2: return "M2";
    case DgpModel::M3: return "M3";
  }
  return "M1";
}

struct DgpSpec {
  DgpModel model = DgpModel::M1;
  int T = 100;
  double lambda0 = 0.5;
  double delta0 = 1.0;
  double beta = 1.0;
  double sigma2 = 1.0;     // variance of e (M1, M3) or of the innovation u (M2)
  double ar_error = 0.0;   // M2
  double ar_lag = 0.0;     // M3
  int burn_in = 0;         // M3

  static DgpSpec make(DgpModel model, double lambda0, double delta0, int T = 100) {
    DgpSpec s;
    s.model = model;
    s.T = T;
    s.lambda0 = lambda0;
    s.delta0 = delta0;
    switch (model) {
      case DgpModel::M1: break;
      case DgpModel::M2: s.ar_error = 0.3; break;
      case DgpModel::M3:
        s.beta = 0.0;
        s.sigma2 = 0.5;
        s.ar_lag = 0.6;
        s.burn_in = 200;
        break;
    }
    return s;
  }
};

struct Simulated {
  RegressionData data;
  TrueDgp truth;
};

inline Simulated generate(const DgpSpec& spec, std::uint64_t seed) {
  if (spec.T < 10) fail(ErrorCode::InvalidArgument, "T must be at least 10");
  if (!(spec.lambda0 > 0.0 && spec.lambda0 < 1.0)) fail(ErrorCode::InvalidArgument, "lambda0 must lie in (0, 1)");
  if (!(spec.sigma2 >= 0.0)) fail(ErrorCode::InvalidArgument, "sigma2 must be nonnegative");
  const int T = spec.T;
  const int tb = true_break_date(T, spec.lambda0);
  const double sd = std::sqrt(spec.sigma2);
  Engine engine = make_engine(seed, 0);
  StandardNormal normal;

  Vector e(T);
  if (spec.model == DgpModel::M2) {
    const double rho = spec.ar_error;
    double prev = sd / std::sqrt(1.0 - rho * rho) * normal(engine);
    for (int t = 0; t < T; ++t) e(t) = prev = rho * prev + sd * normal(engine);
  } else {
    for (int t = 0; t < T; ++t) e(t) = sd * normal(engine);
  }

  Vector y(T);
  Matrix w(T, 0);
  if (spec.model == DgpModel::M3) {
    const double a = spec.ar_lag;
    double lag = spec.beta / (1.0 - a) + sd / std::sqrt(1.0 - a * a) * normal(engine);
    for (int t = 0; t < spec.burn_in; ++t) lag = a * lag + spec.beta + sd * normal(engine);
    w.resize(T, 1);
    for (int t = 0; t < T; ++t) {
      w(t, 0) = lag;
      y(t) = a * lag + spec.beta + (t + 1 > tb ? spec.delta0 : 0.0) + e(t);
      lag = y(t);
    }
  } else {
    for (int t = 0; t < T; ++t) y(t) = spec.beta + (t + 1 > tb ? spec.delta0 : 0.0) + e(t);
  }

  TrueDgp truth;
  truth.lambda0 = {spec.lambda0};
  truth.delta0 = {spec.delta0};
  truth.break_dates = {tb};
  truth.errors = e;
  return {RegressionData(std::move(y), std::move(w), Matrix::Ones(T, 1)), std::move(truth)};
}

/// Argmax-law samples shared across replications, keyed by (xi_e, xi_z)
/// rounded on a logarithmic grid. Each entry's seed depends only on its key,
/// so contents do not depend on the order of requests.
class LimitLawCache {
 public:
  LimitLawCache(std::size_t paths, WienerGrid grid, std::uint64_t seed, double log_step = 0.05)
      : paths_(paths), grid_(grid), seed_(seed), log_step_(log_step) {}

  LimitLawSample get(double xi_e, double xi_z) {
    const auto ke = std::lround(std::log(xi_e) / log_step_);
    const auto kz = std::lround(std::log(xi_z) / log_step_);
    std::lock_guard lock(mutex_);
    auto it = entries_.find({ke, kz});
    if (it == entries_.end()) {
      const std::uint64_t key_seed = split_seed(split_seed(seed_, static_cast<std::uint64_t>(ke)), static_cast<std::uint64_t>(kz));
      auto sample = simulate_argmax_vstar(std::exp(ke * log_step_), std::exp(kz * log_step_), paths_, grid_, key_seed);
      it = entries_.emplace(std::make_pair(ke, kz), std::move(sample)).first;
    }
    return it->second;
  }

  SampleProvider provider() {
    return [this](double xi_e, double xi_z) { return get(xi_e, xi_z); };
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  std::size_t paths_;
  WienerGrid grid_;
  std::uint64_t seed_;
  double log_step_;
  mutable std::mutex mutex_;
  std::map<std::pair<long, long>, LimitLawSample> entries_;
};

/// Outcome of one replication.
struct Replication {
  int true_date = 0;
  int ols = 0;
  int gl_ln = 0;
  int gl_uni = 0;
  bool hdr_cover = false;
  int hdr_length = 0;
  bool bai_cover = false;
  int bai_length = 0;
  bool supw_reject = false;
  bool degenerate = false;
  bool failed = false;
  std::string error;
};

struct CellSpec {
  DgpSpec dgp;
};

struct HarnessOptions {
  int reps = 500;
  std::uint64_t seed = 20240101;
  unsigned threads = 1;
  std::size_t law_paths = 20000;
  WienerGrid grid;
  double alpha = 0.05;
  double trimming = 0.15;
  double temperature = 1.0;
  bool coverage = true;  // sets and sup-Wald
};

/// LRV choice per design: variances for serially uncorrelated errors,
/// prewhitened HAC otherwise.
inline LrvMethod lrv_for(DgpModel model) {
  return model == DgpModel::M2 ? LrvMethod::prewhitened() : LrvMethod::plain();
}

inline Replication run_replication(const DgpSpec& dgp, std::uint64_t seed, const HarnessOptions& options,
                                   const SampleProvider& provider) {
  Replication rep;
  const auto sim = generate(dgp, seed);
  rep.true_date = sim.truth.break_dates.front();
  try {
    BreakSpec spec;
    spec.trimming = options.trimming;
    InferenceConfig config;
    config.loss = LossSpec::absolute();
    config.alpha = options.alpha;
    config.temperature = options.temperature;
    config.lrv = lrv_for(dgp.model);
    config.paths = options.law_paths;
    config.grid = options.grid;
    config.seed = split_seed(seed, 1);
    config.sup_wald = options.coverage;
    config.argmax_provider = provider;
    const auto result = gl_pipeline_single(sim.data, spec, config);
    const auto& inf = result.inference;
    rep.ols = inf.profile.argmax_date;
    rep.gl_ln = inf.estimate.date;
    rep.gl_uni = gl_estimate(quasi_posterior(inf.profile, nullptr, config.temperature), config.loss).date;
    rep.hdr_cover = inf.hdr.contains(rep.true_date);
    rep.hdr_length = static_cast<int>(inf.hdr.length());
    rep.bai_cover = inf.bai.contains(rep.true_date);
    rep.bai_length = static_cast<int>(inf.bai.length());
    rep.supw_reject = result.supwald && result.supwald->reject;
    rep.degenerate = inf.degenerate;
  } catch (const Error& e) {
    rep.failed = true;
    rep.error = e.what();
  }
  return rep;
}

struct MetricsRow {
  std::string model;
  double lambda0 = 0.0;
  double delta0 = 0.0;
  std::string method;
  std::string metric;
  double value = 0.0;
  double mc_se = 0.0;
  int n_reps = 0;
  std::uint64_t seed = 0;
};

struct CellResult {
  DgpSpec dgp;
  std::uint64_t seed = 0;
  std::vector<Replication> reps;
  std::vector<MetricsRow> rows;
  int failures = 0;
  bool flagged = false;  // failures reached 1% of replications

  const MetricsRow* find(const std::string& method, const std::string& metric) const {
    for (const auto& r : rows)
      if (r.method == method && r.metric == metric) return &r;
    return nullptr;
  }
  double value(const std::string& method, const std::string& metric) const {
    const auto* r = find(method, metric);
    if (!r) fail(ErrorCode::InvalidArgument, "no metric " + method + "/" + metric);
    return r->value;
  }
};

namespace detail {

inline double mean(const std::vector<double>& x) {
  return x.empty() ? 0.0 : std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

inline double sample_sd(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size() - 1));
}

/// Standard error of the p-quantile from the spread of neighbouring order
/// statistics.
inline double quantile_se(const std::vector<double>& sorted, double p) {
  const double n = static_cast<double>(sorted.size());
  const double s = std::sqrt(p * (1.0 - p) / n);
  const double lo = sorted_quantile(sorted, std::max(0.0, p - s));
  const double hi = sorted_quantile(sorted, std::min(1.0, p + s));
  return 0.5 * (hi - lo);
}

inline void accuracy_rows(std::vector<MetricsRow>& rows, const MetricsRow& base, const std::vector<double>& est, double truth) {
  const double n = static_cast<double>(est.size());
  std::vector<double> abs_err, sq_err;
  for (double v : est) {
    abs_err.push_back(std::abs(v - truth));
    sq_err.push_back((v - truth) * (v - truth));
  }
  auto sorted = est;
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(est);
  const double rmse = std::sqrt(mean(sq_err));
  auto push = [&](const char* metric, double value, double se) {
    MetricsRow r = base;
    r.metric = metric;
    r.value = value;
    r.mc_se = se;
    rows.push_back(r);
  };
  push("MAE", mean(abs_err), sample_sd(abs_err) / std::sqrt(n));
  push("Std", sd, sd / std::sqrt(2.0 * (n - 1.0)));
  push("RMSE", rmse, rmse > 0.0 ? sample_sd(sq_err) / (2.0 * rmse * std::sqrt(n)) : 0.0);
  push("Q25", sorted_quantile(sorted, 0.25), quantile_se(sorted, 0.25));
  push("Q75", sorted_quantile(sorted, 0.75), quantile_se(sorted, 0.75));
}

inline void proportion_row(std::vector<MetricsRow>& rows, const MetricsRow& base, const char* metric, const std::vector<double>& x) {
  MetricsRow r = base;
  r.metric = metric;
  r.value = mean(x);
  r.mc_se = std::sqrt(r.value * (1.0 - r.value) / static_cast<double>(x.size()));
  rows.push_back(r);
}

inline void mean_row(std::vector<MetricsRow>& rows, const MetricsRow& base, const char* metric, const std::vector<double>& x) {
  MetricsRow r = base;
  r.metric = metric;
  r.value = mean(x);
  r.mc_se = sample_sd(x) / std::sqrt(static_cast<double>(x.size()));
  rows.push_back(r);
}

}  // namespace detail

inline CellResult summarize_cell(const DgpSpec& dgp, std::uint64_t seed, std::vector<Replication> reps, bool coverage) {
  CellResult cell;
  cell.dgp = dgp;
  cell.seed = seed;
  cell.reps = std::move(reps);
  std::vector<double> ols, ln, uni, hdr_c, hdr_l, bai_c, bai_l, rej;
  for (const auto& r : cell.reps) {
    if (r.failed) {
      ++cell.failures;
      continue;
    }
    ols.push_back(r.ols);
    ln.push_back(r.gl_ln);
    uni.push_back(r.gl_uni);
    hdr_c.push_back(r.hdr_cover);
    hdr_l.push_back(r.hdr_length);
    bai_c.push_back(r.bai_cover);
    bai_l.push_back(r.bai_length);
    rej.push_back(r.supw_reject);
  }
  const int n = static_cast<int>(ols.size());
  cell.flagged = cell.failures * 100 >= static_cast<int>(cell.reps.size());
  MetricsRow base;
  base.model = to_string(dgp.model);
  base.lambda0 = dgp.lambda0;
  base.delta0 = dgp.delta0;
  base.n_reps = n;
  base.seed = seed;
  if (n > 0) {
    const double truth = cell.reps.front().true_date;
    if (!coverage) {
      base.method = "OLS";
      detail::accuracy_rows(cell.rows, base, ols, truth);
      base.method = "GL-LN";
      detail::accuracy_rows(cell.rows, base, ln, truth);
      base.method = "GL-Uni";
      detail::accuracy_rows(cell.rows, base, uni, truth);
    } else {
      base.method = "GL-LN";
      detail::proportion_row(cell.rows, base, "Cov", hdr_c);
      detail::mean_row(cell.rows, base, "Lgth", hdr_l);
      base.method = "Bai";
      detail::proportion_row(cell.rows, base, "Cov", bai_c);
      detail::mean_row(cell.rows, base, "Lgth", bai_l);
      base.method = "sup-W";
      detail::proportion_row(cell.rows, base, "Rej", rej);
    }
  }
  base.method = "all";
  MetricsRow f = base;
  f.metric = "failures";
  f.value = cell.failures;
  cell.rows.push_back(f);
  f.metric = "flagged";
  f.value = cell.flagged ? 1.0 : 0.0;
  cell.rows.push_back(f);
  return cell;
}

/// Runs one cell; replication r uses split_seed(seed, r).
inline CellResult run_cell(const DgpSpec& dgp, std::uint64_t seed, const HarnessOptions& options, LimitLawCache& cache) {
  if (options.reps < 1) fail(ErrorCode::InvalidArgument, "reps must be positive");
  std::vector<Replication> reps(static_cast<std::size_t>(options.reps));
  const auto provider = cache.provider();
  parallel_for(reps.size(), options.threads,
               [&](std::size_t r) { reps[r] = run_replication(dgp, split_seed(seed, r), options, provider); });
  return summarize_cell(dgp, seed, std::move(reps), options.coverage);
}

/// Designs of tables 1-6: 1-3 report accuracy for M1-M3, 4-6 coverage.
inline std::vector<DgpSpec> table_cells(int table) {
  if (table < 1 || table > 6) fail(ErrorCode::InvalidArgument, "table must be 1..6");
  const auto model = static_cast<DgpModel>((table - 1) % 3);
  std::vector<DgpSpec> cells;
  if (table <= 3) {
    for (double lambda : {0.3, 0.5})
      for (double delta : {0.3, 0.4, 0.6, 1.0}) cells.push_back(DgpSpec::make(model, lambda, delta));
  } else {
    for (double lambda : {0.5, 0.3})
      for (double delta : {0.4, 0.8, 1.2, 1.6}) cells.push_back(DgpSpec::make(model, lambda, delta));
  }
  return cells;
}

struct TableResult {
  int table = 0;
  std::vector<CellResult> cells;
};

/// Cell i of a table uses seed split_seed(options.seed, i); the argmax-law
/// cache is shared across the table's cells.
inline TableResult run_table(int table, const HarnessOptions& options) {
  if (options.reps < 100) fail(ErrorCode::InvalidArgument, "tables need at least 100 replications");
  HarnessOptions opts = options;
  opts.coverage = table >= 4;
  LimitLawCache cache(opts.law_paths, opts.grid, split_seed(opts.seed, 0xCAC4E));
  TableResult out;
  out.table = table;
  const auto cells = table_cells(table);
  for (std::size_t i = 0; i < cells.size(); ++i) out.cells.push_back(run_cell(cells[i], split_seed(opts.seed, i), opts, cache));
  return out;
}

inline void write_metrics_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "model,lambda0,delta0,method,metric,value,mc_se,n_reps,seed\n";
  out.precision(10);
  for (const auto& cell : cells)
    for (const auto& r : cell.rows)
      out << r.model << ',' << r.lambda0 << ',' << r.delta0 << ',' << r.method << ',' << r.metric << ',' << r.value << ','
          << r.mc_se << ',' << r.n_reps << ',' << r.seed << '\n';
}

/// Per-replication audit trail.
inline void write_replications_csv(std::ostream& out, const std::vector<CellResult>& cells) {
  out << "model,lambda0,delta0,rep,true_date,ols,gl_ln,gl_uni,hdr_cover,hdr_length,bai_cover,bai_length,supw_reject,degenerate,failed\n";
  for (const auto& cell : cells)
    for (std::size_t i = 0; i < cell.reps.size(); ++i) {
      const auto& r = cell.reps[i];
      out << to_string(cell.dgp.model) << ',' << cell.dgp.lambda0 << ',' << cell.dgp.delta0 << ',' << i << ',' << r.true_date
          << ',' << r.ols << ',' << r.gl_ln << ',' << r.gl_uni << ',' << r.hdr_cover << ',' << r.hdr_length << ','
          << r.bai_cover << ',' << r.bai_length << ',' << r.supw_reject << ',' << r.degenerate << ',' << r.failed << '\n';
    }
}

/// One-sided paired test of E[x - y] < 0 (normal approximation).
struct PairedTest {
  double mean_diff = 0.0;
  double se = 0.0;
  double t = 0.0;
  double p_value = 1.0;
};

inline PairedTest paired_less(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "paired test needs equal sizes >= 2");
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
  PairedTest out;
  out.mean_diff = detail::mean(d);
  out.se = detail::sample_sd(d) / std::sqrt(static_cast<double>(d.size()));
  if (out.se == 0.0) {
    out.t = out.mean_diff < 0.0 ? -std::numeric_limits<double>::infinity() : 0.0;
    out.p_value = out.mean_diff < 0.0 ? 0.0 : 1.0;
    return out;
  }
  out.t = out.mean_diff / out.se;
  out.p_value = 0.5 * std::erfc(-out.t / std::sqrt(2.0));
  return out;
}

/// Absolute errors of one estimator across the successful replications.
inline std::vector<double> absolute_errors(const CellResult& cell, int Replication::*field) {
  std::vector<double> out;
  for (const auto& r : cell.reps)
    if (!r.failed) out.push_back(std::abs(r.*field - r.true_date));
  return out;
}

}  // namespace glbreak
