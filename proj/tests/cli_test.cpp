#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "bendbench/cli.hpp"

namespace bendbench {
namespace {

namespace fs = std::filesystem;

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run_cli(std::initializer_list<std::string> args) {
  std::vector<std::string> storage{"bendbench"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> fields(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  for (std::string f; std::getline(in, f, ',');) out.push_back(f);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("bendbench_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("BENDBENCH_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& leaf) const { return (dir_ / leaf).string(); }

  fs::path dir_;
};

TEST_F(CliTest, EvalConformalOptimum) {
  const auto r = run_cli({"eval", "-2.5,2.5"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_LE(std::stod(r.out), 1e-9);
}

TEST_F(CliTest, EvalRawAndSingular) {
  auto r = run_cli({"eval", "--transform", "raw", "0,1", "1,0"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "1000000\n1\n");
  r = run_cli({"eval", "0,0"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "singular(penalty=1000000000000)\n");
}

TEST_F(CliTest, EvalParseErrors) {
  EXPECT_EQ(run_cli({"eval", "x,y"}).code, 2);
  EXPECT_EQ(run_cli({"eval", "1"}).code, 2);
  EXPECT_EQ(run_cli({"eval", "1,2,"}).code, 2);
  EXPECT_EQ(run_cli({"eval"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"bogus"}).code, 2);
  EXPECT_EQ(run_cli({"eval", "--xi", "0", "1,1"}).code, 2);
  EXPECT_EQ(run_cli({"eval", "--transform", "twisted", "1,1"}).code, 2);
  EXPECT_EQ(run_cli({"--help"}).code, 0);
}

TEST_F(CliTest, EvalUnknownBaseIsConstructionError) {
  EXPECT_EQ(run_cli({"eval", "--base", "rastrigin", "1,1"}).code, 4);
}

TEST_F(CliTest, GridRaw) {
  const auto r = run_cli({"grid", "--transform", "raw", "--resolution", "3", "--out", path("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ls = lines(slurp(dir_ / "g" / "grid.csv"));
  ASSERT_EQ(ls.size(), 10u);
  EXPECT_EQ(ls[0], "x1,x2,value,singular");
  EXPECT_EQ(ls[1], "-5,-5,25000025,false");
  EXPECT_EQ(ls[2], "0,-5,25000000,false");  // x1 varies fastest
}

TEST_F(CliTest, GridConformalMeta) {
  const auto r = run_cli({"grid", "--resolution", "5", "--out", path("g")});
  ASSERT_EQ(r.code, 0) << r.err;
  int singular = 0;
  for (const auto& l : lines(slurp(dir_ / "g" / "grid.csv"))) {
    if (l.ends_with(",true")) {
      ++singular;
      EXPECT_EQ(l, "0,0,1000000000000,true");
    }
  }
  EXPECT_EQ(singular, 1);
  const auto meta = nlohmann::json::parse(slurp(dir_ / "g" / "meta.json"));
  EXPECT_NEAR(meta["optimum_x"][0].get<double>(), -2.5, 1e-12);
  EXPECT_NEAR(meta["optimum_x"][1].get<double>(), 2.5, 1e-12);
  EXPECT_EQ(meta["resolution"], 5);
  EXPECT_EQ(run_spec_from_json(meta["spec"]), RunSpec{});
}

TEST_F(CliTest, GridErrors) {
  EXPECT_EQ(run_cli({"grid", "--resolution", "1", "--out", path("g")}).code, 2);
  EXPECT_EQ(run_cli({"grid", "--resolution", "4002", "--out", path("g")}).code, 2);
  std::ofstream(path("file")) << "x";
  EXPECT_EQ(run_cli({"grid", "--resolution", "3", "--out", path("file") + "/sub"}).code, 3);
}

TEST_F(CliTest, RunWritesSchemasAndIsReproducible) {
  auto a = run_cli({"run", "--trials", "2", "--seed", "11", "--max-fes", "5000", "--jobs", "1",
                    "--out", path("a")});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_TRUE(a.out.starts_with("rt_s="));
  auto b = run_cli({"run", "--trials", "2", "--seed", "11", "--max-fes", "5000", "--jobs", "2",
                    "--out", path("b")});
  ASSERT_EQ(b.code, 0) << b.err;
  for (const char* f : {"trials.csv", "traces.csv", "summary.csv", "meta.json"}) {
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  }
  const auto trials = lines(slurp(dir_ / "a" / "trials.csv"));
  ASSERT_EQ(trials.size(), 3u);
  EXPECT_EQ(trials[0], "trial_id,seed,fes_used,success,best_f");
  EXPECT_TRUE(trials[1].starts_with("0,11,"));
  EXPECT_TRUE(trials[2].starts_with("1,12,"));
  const auto summary = lines(slurp(dir_ / "a" / "summary.csv"));
  ASSERT_EQ(summary.size(), 2u);
  EXPECT_EQ(summary[0], "param_value,rt_s,rt_us,p_s,ert");
  EXPECT_EQ(lines(slurp(dir_ / "a" / "traces.csv"))[0], "trial_id,fes,best_f");
}

TEST_F(CliTest, MetaRoundTripsResolvedSpec) {
  std::ofstream(path("cfg.json")) << R"({
    "objective": {"transform": "rotated", "rotation": {"angle": 0.25}, "bend": {"psi": 2}},
    "optimizer": {"id": "pso", "pso": {"swarm_size": 12}},
    "trials": {"n_trials": 2, "base_seed": 5, "max_fes": 600}
  })";
  const auto r = run_cli({"run", "--config", path("cfg.json"), "--xi", "1.5", "--out", path("o")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto meta = nlohmann::json::parse(slurp(dir_ / "o" / "meta.json"));
  const RunSpec spec = run_spec_from_json(meta["spec"]);
  EXPECT_EQ(spec.objective.transform, TransformKind::kRotated);
  EXPECT_EQ(spec.objective.rotation_angle, 0.25);
  EXPECT_EQ(spec.objective.bend.psi, 2.0);
  EXPECT_EQ(spec.objective.bend.xi, 1.5);
  EXPECT_EQ(spec.optimizer, OptimizerId::kPso);
  EXPECT_EQ(spec.pso.swarm_size, 12);
  EXPECT_EQ(spec.base_seed, 5u);
  EXPECT_EQ(to_json(spec), meta["spec"]);
}

TEST_F(CliTest, SeedPrecedence) {
  std::ofstream(path("cfg.json")) << R"({"trials": {"n_trials": 1, "max_fes": 100}})";
  setenv("BENDBENCH_SEED", "77", 1);
  ASSERT_EQ(run_cli({"run", "--config", path("cfg.json"), "--out", path("env")}).code, 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "env" / "meta.json"))["spec"]["trials"]["base_seed"],
            77);
  ASSERT_EQ(run_cli({"run", "--config", path("cfg.json"), "--seed", "3", "--out", path("flag")}).code,
            0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir_ / "flag" / "meta.json"))["spec"]["trials"]["base_seed"],
            3);
  setenv("BENDBENCH_SEED", "abc", 1);
  EXPECT_EQ(run_cli({"run", "--config", path("cfg.json"), "--out", path("bad")}).code, 2);
  unsetenv("BENDBENCH_SEED");
}

TEST_F(CliTest, ConfigErrors) {
  std::ofstream(path("typo.json")) << R"({"trials": {"ntrials": 3}})";
  EXPECT_EQ(run_cli({"run", "--config", path("typo.json"), "--out", path("o")}).code, 2);
  std::ofstream(path("broken.json")) << "{not json";
  EXPECT_EQ(run_cli({"run", "--config", path("broken.json"), "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"run", "--config", path("missing.json"), "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"run", "--trials", "0", "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"run", "--jobs", "0", "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"run", "--base", "nope", "--trials", "1", "--out", path("o")}).code, 4);
}

TEST_F(CliTest, SweepSingleValueMatchesRun) {
  ASSERT_EQ(run_cli({"run", "--trials", "3", "--max-fes", "4000", "--out", path("run")}).code, 0);
  const auto r = run_cli({"sweep", "--param", "xi", "--values", "1", "--trials", "3",
                          "--max-fes", "4000", "--out", path("sw")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sweep_rows = lines(slurp(dir_ / "sw" / "sweep_xi.csv"));
  ASSERT_EQ(sweep_rows.size(), 2u);
  EXPECT_EQ(sweep_rows[0], "param_value,rt_s,rt_us,p_s,ert,mean_fes,norm_ert,norm_mean_fes");
  const auto run_rows = lines(slurp(dir_ / "run" / "summary.csv"));
  // same rt_s,rt_us,p_s,ert after the param_value column
  const auto sweep_fields = fields(sweep_rows[1]);
  const auto run_fields = fields(run_rows[1]);
  ASSERT_EQ(run_fields.size(), 5u);
  for (int i = 1; i <= 4; ++i) EXPECT_EQ(sweep_fields[i], run_fields[i]);
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "sweep_xi_trials.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "sw" / "meta.json"));
}

TEST_F(CliTest, SweepValidation) {
  EXPECT_EQ(run_cli({"sweep", "--param", "xi", "--values", "0", "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--param", "xi", "--values", "2,1", "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--param", "zeta", "--values", "1", "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--param", "xi", "--values", "1,a", "--out", path("o")}).code, 2);
  EXPECT_EQ(run_cli({"sweep", "--values", "1", "--out", path("o")}).code, 2);
}

}  // namespace
}  // namespace bendbench
