// glbreak command-line front end.
//
//   glbreak fit            --csv data.csv [-m 1] [--eps 0.15] [--structure partial]
//   glbreak infer          --csv data.csv [--loss absolute] [--prior limit] [--alpha 0.05] ...
//   glbreak simulate-limit [--xi-e 1] [--xi-z 1] [--law argmax] [--paths 100000] ...
//   glbreak mc-table       --table 1 [--reps 500] ...
//
// Exit codes: 0 success, 2 data or argument errors, 3 infeasible segmentation.

#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "glbreak/glbreak.hpp"

namespace {

using namespace glbreak;

constexpr int kExitData = 2;
constexpr int kExitInfeasible = 3;

class Binder {
 public:
  Binder(RunConfig& target, RunConfig& parsed) : target_(target), parsed_(parsed) {}

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& flags, T RunConfig::*member, const std::string& help) {
    auto* opt = app->add_option(flags, parsed_.*member, help)->default_val(parsed_.*member);
    copies_.push_back([this, opt, member] {
      if (opt->count() > 0) target_.*member = parsed_.*member;
    });
    return opt;
  }

  void apply() const {
    for (const auto& c : copies_) c();
  }

 private:
  RunConfig& target_;
  RunConfig& parsed_;
  std::vector<std::function<void()>> copies_;
};

void emit(const std::string& path, const std::function<void(std::ostream&)>& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path);
  if (!out) fail(ErrorCode::InvalidData, "cannot write " + path);
  write(out);
}

int run_fit(const RunConfig& c) {
  const auto data = read_regression_csv(c.csv);
  const auto spec = break_spec(c);
  SegmentedFit fit;
  if (spec.num_breaks == 1) {
    const auto profile = profile_single(data, spec);
    fit = ols_concentrated(data, spec, {profile.argmax_date});
    if (!c.out.empty()) emit(c.out, [&](std::ostream& os) { write_profile_csv(os, profile); });
  } else {
    fit = fit_multiple(data, spec);
  }
  std::cout << fit_json(fit).dump(2) << '\n';
  return 0;
}

int run_infer(const RunConfig& c) {
  const auto data = read_regression_csv(c.csv);
  const auto spec = break_spec(c);
  const auto cfg = inference_config(c);
  if (spec.num_breaks == 1) {
    const auto result = gl_pipeline_single(data, spec, cfg);
    std::cout << result_json(result, cfg.loss).dump(2) << '\n';
    if (!c.out.empty()) emit(c.out, [&](std::ostream& os) { write_posterior_csv(os, result.inference.posterior); });
    if (!c.samples_out.empty()) emit(c.samples_out, [&](std::ostream& os) { write_sample_csv(os, result.inference.argmax_sample); });
  } else {
    const auto result = gl_pipeline_multiple(data, spec, cfg);
    std::cout << result_json(result, cfg.loss).dump(2) << '\n';
  }
  return 0;
}

int run_simulate_limit(const RunConfig& c) {
  WienerGrid grid;
  grid.step = c.step;
  grid.half_width = c.half_width;
  LimitLawSample sample;
  if (c.law == "argmax") sample = simulate_argmax_vstar(c.xi_e, c.xi_z, c.paths, grid, c.seed, c.threads);
  else if (c.law == "bayes") sample = simulate_bayes_ratio(parse_loss(c.loss), c.xi_e, c.xi_z, c.paths, grid, c.kappa, c.seed, c.threads);
  else fail(ErrorCode::InvalidArgument, "law must be 'argmax' or 'bayes'");
  if (!c.out.empty()) emit(c.out, [&](std::ostream& os) { write_sample_csv(os, sample); });
  const std::vector<double> probs{0.005, 0.025, 0.05, 0.25, 0.5, 0.75, 0.95, 0.975, 0.995};
  const auto q = quantiles(sample, probs);
  Json qs = Json::object();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    char key[16];
    std::snprintf(key, sizeof key, "%g", probs[i]);
    qs[key] = q[i];
  }
  Json out{{"law", to_string(sample.law)},
           {"xi_e", c.xi_e},
           {"xi_z", c.xi_z},
           {"paths", sample.size()},
           {"seed", c.seed},
           {"half_width", sample.grid.half_width},
           {"step", sample.grid.step},
           {"quantiles", qs}};
  if (sample.law == LimitLaw::BayesRatio) {
    out["kappa"] = c.kappa;
    out["loss"] = c.loss;
    out["non_integrable"] = sample.non_integrable;
  } else {
    out["interior_fraction"] = sample.interior_fraction;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int run_mc_table(const RunConfig& c) {
  HarnessOptions opt;
  opt.reps = c.reps;
  opt.seed = c.seed;
  opt.threads = c.threads;
  opt.law_paths = c.law_paths;
  opt.grid.step = c.step;
  opt.grid.half_width = c.half_width;
  opt.alpha = c.alpha;
  opt.trimming = c.trimming;
  opt.temperature = c.temperature;
  const auto table = run_table(c.table, opt);
  emit(c.out, [&](std::ostream& os) { write_metrics_csv(os, table.cells); });
  if (!c.audit_out.empty()) emit(c.audit_out, [&](std::ostream& os) { write_replications_csv(os, table.cells); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Break-date estimation and inference with generalized Laplace estimators"};
  app.require_subcommand(0, 1);

  RunConfig parsed;
  RunConfig cfg;
  Binder bind(cfg, parsed);
  std::string config_path;
  std::string dump_path;
  app.add_option("--config", config_path, "JSON run configuration; explicit flags override it")->check(CLI::ExistingFile);
  app.add_option("--dump-config", dump_path, "write the effective configuration as JSON and exit");
  bind.add(&app, "--seed", &RunConfig::seed, "master seed (falls back to GLBREAK_SEED)");
  bind.add(&app, "--threads", &RunConfig::threads, "worker threads; never changes output");

  auto* fit = app.add_subcommand("fit", "least-squares break dates");
  auto* infer = app.add_subcommand("infer", "GL estimate, HDR set, Bai interval and sup-Wald test");
  auto* sim = app.add_subcommand("simulate-limit", "draws from a limit law");
  auto* mc = app.add_subcommand("mc-table", "Monte Carlo table");

  for (auto* sub : {fit, infer}) {
    bind.add(sub, "--csv", &RunConfig::csv, "input CSV with header y,w1..,z1..");
    bind.add(sub, "-m,--breaks", &RunConfig::breaks, "number of breaks");
    bind.add(sub, "--eps,--trimming", &RunConfig::trimming, "trimming fraction");
    bind.add(sub, "--structure", &RunConfig::structure, "partial or pure")->check(CLI::IsMember({"partial", "pure"}));
  }
  bind.add(fit, "--profile-out", &RunConfig::out, "write the criterion profile CSV (single break)");
  bind.add(infer, "--loss", &RunConfig::loss, "squared | absolute | check:TAU | polynomial:M");
  bind.add(infer, "--prior", &RunConfig::prior, "limit or uniform")->check(CLI::IsMember({"limit", "uniform"}));
  bind.add(infer, "--prior-law", &RunConfig::prior_law, "argmax or bayes")->check(CLI::IsMember({"argmax", "bayes"}));
  bind.add(infer, "--alpha", &RunConfig::alpha, "1 - confidence level");
  bind.add(infer, "--temperature", &RunConfig::temperature, "multiplier of the criterion in the quasi-posterior");
  bind.add(infer, "--lrv", &RunConfig::lrv, "plain | newey_west | prewhitened_hac");
  bind.add(infer, "--bandwidth", &RunConfig::bandwidth, "Bartlett lag (negative: automatic)");
  bind.add(infer, "--paths", &RunConfig::paths, "limit-law paths");
  bind.add(infer, "--posterior-out", &RunConfig::out, "write the quasi-posterior CSV");
  bind.add(infer, "--samples-out", &RunConfig::samples_out, "write the argmax-law draws CSV");

  bind.add(sim, "--xi-e", &RunConfig::xi_e, "error-variance ratio");
  bind.add(sim, "--xi-z", &RunConfig::xi_z, "regressor-moment ratio");
  bind.add(sim, "--law", &RunConfig::law, "argmax or bayes")->check(CLI::IsMember({"argmax", "bayes"}));
  bind.add(sim, "--loss", &RunConfig::loss, "loss for the bayes law");
  bind.add(sim, "--kappa", &RunConfig::kappa, "exponent scale for the bayes law");
  bind.add(sim, "--paths", &RunConfig::paths, "number of paths");
  for (auto* sub : {infer, sim}) {
    bind.add(sub, "--step", &RunConfig::step, "grid step");
    bind.add(sub, "--half-width", &RunConfig::half_width, "grid half-width");
  }
  bind.add(sim, "--out", &RunConfig::out, "write draws as CSV");

  bind.add(mc, "--table", &RunConfig::table, "table number 1..6")->check(CLI::Range(1, 6));
  bind.add(mc, "--reps", &RunConfig::reps, "replications per cell");
  bind.add(mc, "--law-paths", &RunConfig::law_paths, "paths per cached limit-law sample");
  bind.add(mc, "--out", &RunConfig::out, "metrics CSV (default stdout)");
  bind.add(mc, "--audit-out", &RunConfig::audit_out, "per-replication CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    bool seed_known = false;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      try {
        cfg = nlohmann::json::parse(in).get<RunConfig>();
      } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::InvalidData, config_path + ": " + e.what());
      }
      seed_known = true;
    }
    bind.apply();
    if (app.get_option("--seed")->count() > 0) seed_known = true;
    if (!seed_known) {
      if (const char* env = std::getenv("GLBREAK_SEED")) {
        try {
          cfg.seed = std::stoull(env);
        } catch (const std::exception&) {
          fail(ErrorCode::InvalidArgument, std::string("GLBREAK_SEED is not an unsigned integer: ") + env);
        }
      }
    }
    for (auto* sub : {fit, infer, sim, mc})
      if (sub->parsed()) cfg.command = sub->get_name();

    if (!dump_path.empty()) {
      emit(dump_path, [&](std::ostream& os) { os << nlohmann::json(cfg).dump(2) << '\n'; });
      return 0;
    }
    if (cfg.command == "fit") return run_fit(cfg);
    if (cfg.command == "infer") return run_infer(cfg);
    if (cfg.command == "simulate-limit") return run_simulate_limit(cfg);
    if (cfg.command == "mc-table") return run_mc_table(cfg);
    std::cerr << app.help();
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::InfeasibleSegmentation ? kExitInfeasible : kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
