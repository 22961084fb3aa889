#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

#include "support.hpp"

using namespace glbreak;
using namespace glbreak::testing;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" GLBREAK_CLI_PATH "\" " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) r.out += buf;
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("glbreak_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_csv(const std::string& name, const RegressionData& data) {
    const auto path = (dir_ / name).string();
    std::ofstream out(path);
    write_regression_csv(out, data);
    return path;
  }
  std::string write_text(const std::string& name, const std::string& text) {
    const auto path = (dir_ / name).string();
    std::ofstream(path) << text;
    return path;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

std::vector<int> set_dates(const nlohmann::json& j, const std::string& method) {
  for (const auto& s : j["sets"])
    if (s["method"] == method) return s["dates"].get<std::vector<int>>();
  return {};
}

}  // namespace

TEST_F(Cli, FitNoiselessStep) {
  const auto csv = write_csv("step.csv", step_series(100, 50, 1.0));
  const auto r = run("fit --csv " + csv);
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(parse(r)["dates"], nlohmann::json::array({50}));
}

TEST_F(Cli, FitMultipleAndProfile) {
  Vector y(90);
  for (int t = 0; t < 90; ++t) y(t) = t < 30 ? 0.0 : t < 60 ? 2.0 : -1.0;
  const auto csv = write_csv("two.csv", RegressionData::mean_shift(y));
  const auto r = run("fit --csv " + csv + " -m 2");
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_EQ(parse(r)["dates"], nlohmann::json::array({30, 60}));
  const auto p = run("fit --csv " + csv + " --profile-out " + path("profile.csv"));
  ASSERT_EQ(p.status, 0) << p.out;
  std::ifstream in(path("profile.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.substr(0, 5), "date,");
}

TEST_F(Cli, MalformedCsv) {
  const auto csv = write_text("bad.csv", "y,z1\n1,1\n2,1\nnot-a-number,1\n");
  const auto r = run("fit --csv " + csv);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("line 4"), std::string::npos) << r.out;
  EXPECT_EQ(run("fit --csv " + path("missing.csv")).status, 2);
}

TEST_F(Cli, InfeasibleSegmentation) {
  const auto csv = write_csv("short.csv", random_instance(20, 0, 1, 1));
  const auto r = run("fit --csv " + csv + " -m 8");
  EXPECT_EQ(r.status, 3) << r.out;
}

TEST_F(Cli, InferDeterministic) {
  const auto csv = write_csv("noisy.csv", random_instance(100, 0, 1, 2, {50}, 1.0));
  const auto a = run("--seed 7 infer --csv " + csv + " --paths 5000");
  const auto b = run("--seed 7 --threads 3 infer --csv " + csv + " --paths 5000");
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(a.out, b.out);
  const auto j = parse(a);
  EXPECT_EQ(j["break_estimates"].size(), 2u);
  EXPECT_EQ(j["sets"].size(), 2u);
  EXPECT_TRUE(j["supwald"]["reject"].is_boolean());
  EXPECT_TRUE(j["diagnostics"]["xi_z"].is_number());
}

TEST_F(Cli, UniformPriorMatchesLibrary) {
  const auto data = random_instance(100, 0, 1, 3, {40}, 0.6);
  const auto csv = write_csv("uni.csv", data);
  const auto r = run("infer --csv " + csv + " --prior uniform --paths 2000 --posterior-out " + path("post.csv"));
  ASSERT_EQ(r.status, 0) << r.out;
  BreakSpec spec;
  const auto qp = quasi_posterior(profile_single(read_regression_csv(csv), spec), nullptr);
  const auto expected = gl_estimate(qp, LossSpec::absolute()).date;
  for (const auto& e : parse(r)["break_estimates"])
    if (e["method"] == "gl") EXPECT_EQ(e["date"].get<int>(), expected);
  std::ifstream in(path("post.csv"));
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "date,pmf");
}

TEST_F(Cli, NestedSets) {
  const auto csv = write_csv("nest.csv", random_instance(100, 0, 1, 4, {50}, 0.7));
  const auto wide = run("--seed 1 infer --csv " + csv + " --alpha 0.05 --paths 5000");
  const auto narrow = run("--seed 1 infer --csv " + csv + " --alpha 0.10 --paths 5000");
  ASSERT_EQ(wide.status, 0) << wide.out;
  const auto w = set_dates(parse(wide), "hdr_gl");
  const auto n = set_dates(parse(narrow), "hdr_gl");
  ASSERT_FALSE(n.empty());
  for (int d : n) EXPECT_TRUE(std::binary_search(w.begin(), w.end(), d));
}

TEST_F(Cli, ConfigRoundTripAndOverride) {
  const auto csv = write_csv("cfg.csv", random_instance(100, 0, 1, 5, {50}, 1.0));
  const auto dumped = path("dump.json");
  ASSERT_EQ(run("--seed 11 --dump-config " + dumped + " infer --csv " + csv + " --alpha 0.1 --paths 3000").status, 0);
  std::ifstream in(dumped);
  const auto cfg = nlohmann::json::parse(in).get<RunConfig>();
  EXPECT_EQ(cfg.command, "infer");
  EXPECT_EQ(cfg.seed, 11u);
  EXPECT_DOUBLE_EQ(cfg.alpha, 0.1);
  EXPECT_EQ(cfg.paths, 3000u);
  EXPECT_EQ(nlohmann::json(cfg).get<RunConfig>(), cfg);

  const auto from_config = run("--config " + dumped);
  const auto from_flags = run("--seed 11 infer --csv " + csv + " --alpha 0.1 --paths 3000");
  ASSERT_EQ(from_config.status, 0) << from_config.out;
  EXPECT_EQ(from_config.out, from_flags.out);

  const auto redumped = path("redump.json");
  ASSERT_EQ(run("--config " + dumped + " --dump-config " + redumped + " infer --alpha 0.2").status, 0);
  std::ifstream in2(redumped);
  const auto cfg2 = nlohmann::json::parse(in2).get<RunConfig>();
  EXPECT_DOUBLE_EQ(cfg2.alpha, 0.2);
  EXPECT_EQ(cfg2.paths, 3000u);
}

TEST_F(Cli, SeedFromEnvironment) {
  const auto a = run("--dump-config - simulate-limit", "GLBREAK_SEED=42");
  ASSERT_EQ(a.status, 0) << a.out;
  EXPECT_EQ(parse(a)["seed"], 42);
  const auto b = run("--seed 5 --dump-config - simulate-limit", "GLBREAK_SEED=42");
  EXPECT_EQ(parse(b)["seed"], 5);
  EXPECT_EQ(run("simulate-limit --paths 10", "GLBREAK_SEED=abc").status, 2);
}

TEST_F(Cli, SimulateLimit) {
  const auto draws = path("draws.csv");
  const auto r = run("--seed 3 simulate-limit --paths 2000 --out " + draws);
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = parse(r);
  EXPECT_EQ(j["law"], "argmax");
  EXPECT_EQ(j["paths"], 2000);
  EXPECT_LT(j["quantiles"]["0.025"].get<double>(), 0.0);
  std::ifstream in(draws);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 2001);
  const auto bayes = run("--seed 3 simulate-limit --law bayes --loss squared --kappa 2 --paths 500");
  ASSERT_EQ(bayes.status, 0) << bayes.out;
  EXPECT_EQ(parse(bayes)["law"], "bayes");
}

TEST_F(Cli, McTableArguments) {
  EXPECT_NE(run("mc-table --table 7").status, 0);
  EXPECT_EQ(run("mc-table --table 1 --reps 10").status, 2);
}
