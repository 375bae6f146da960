#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "hardylab/cli.hpp"
#include "hardylab/errors.hpp"
#include "schema_check.hpp"

using namespace hardylab;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::filesystem::path scratch_dir() {
  const std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "hardylab_cli_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  REQUIRE(out.good());
  out << text;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

const schema_check::json& report_schema() {
  static const schema_check::json schema =
      schema_check::load_schema(HARDYLAB_REPO_DIR "/schemas/report.schema.json");
  return schema;
}

void check_schema(const ordered_json& report) {
  const schema_check::json plain = schema_check::json::parse(report.dump());
  std::string error;
  const bool ok = schema_check::validate(report_schema(), plain, error);
  INFO(error);
  CHECK(ok);
}

}  // namespace

TEST_CASE("eval reports the mean value") {
  CliRun r = run({"eval", "--mean", "arithmetic", "--vector", "1,3"});
  CHECK(r.code == 0);
  CHECK(r.err.empty());
  const ordered_json rep = ordered_json::parse(r.out);
  CHECK(rep["command"] == "eval");
  CHECK(rep["result"]["value"].get<double>() == 2.0);
  check_schema(rep);
}

TEST_CASE("help text lists every command") {
  CliRun r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out.find("usage: hardylab") != std::string::npos);
  for (const char* cmd :
       {"eval", "axioms", "hardy-constant", "hardy-ratio", "ratios",
        "test-hardy", "test-weak-hardy", "lemma1", "counterexample"}) {
    CHECK(r.out.find(cmd) != std::string::npos);
  }
}

TEST_CASE("exit code 2 covers usage mistakes") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate", "--mean", "arithmetic"}).code == 2);
  CHECK(run({"eval", "--mean"}).code == 2);
  CHECK(run({"eval", "--mean", "power", "--vector", "1,2"}).code == 2);
  CHECK(run({"eval", "--mean", "arithmetic", "--vector", "1,-2"}).code == 2);
  CHECK(run({"eval", "--mean", "arithmetic"}).code == 2);
  CHECK(run({"ratios", "--mean", "arithmetic", "--seq", "custom:log(",
             "--n", "10"}).code == 2);
  CHECK(run({"eval", "--mean", "arithmetic", "--vector", "1", "--frob", "x"})
            .code == 2);
  CHECK(run({"hardy-constant", "--mean", "min", "--n", "0"}).code == 2);
  CHECK(run({"hardy-constant", "--mean", "min", "--n", "100", "--tol", "0"})
            .code == 2);
  CHECK(run({"eval", "--mean", "arithmetic", "--vector", "1", "--output",
             "xml"}).code == 2);

  CliRun unknown = run({"frobnicate", "--mean", "arithmetic"});
  CHECK(unknown.err.find("unknown command") != std::string::npos);
  CHECK(unknown.out.empty());
}

TEST_CASE("exit code 2 covers flag and command mismatches") {
  CHECK(run({"axioms", "--mean", "arithmetic", "--n", "10", "--vector", "1,2"})
            .code == 2);
  CHECK(run({"ratios", "--mean", "arithmetic", "--seq", "harmonic", "--n",
             "10", "--tol", "0.5"}).code == 2);
  CHECK(run({"eval", "--mean", "arithmetic", "--vector", "1", "--s-grid",
             "1"}).code == 2);
  CHECK(run({"hardy-constant", "--mean", "min", "--seq", "harmonic", "--n",
             "100"}).code == 2);
  CHECK(run({"test-weak-hardy", "--mean", "arithmetic", "--seq", "harmonic",
             "--n", "100", "--s-grid", "1,-1"}).code == 2);

  CliRun csv = run({"test-hardy", "--mean", "arithmetic", "--seq", "harmonic",
                    "--n", "100", "--output", "csv"});
  CHECK(csv.code == 2);
  CHECK(csv.err.find("not available") != std::string::npos);
}

TEST_CASE("exit code 3 flags construction faults") {
  // Ratio sequence of the min mean over a constant is identically 1, so no
  // block ever closes.
  CliRun r = run({"lemma1", "--mean", "min", "--seq", "constant:1", "--n",
                  "100"});
  CHECK(r.code == 3);
  CHECK(r.err.find("numerical fault") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("refusals complete with exit code 0") {
  CliRun r = run({"counterexample", "--mean", "geometric", "--seq", "harmonic",
                  "--n", "5000"});
  CHECK(r.code == 0);
  const ordered_json rep = ordered_json::parse(r.out);
  CHECK(rep["result"]["verdict"] == "refused");
  CHECK(rep["result"]["refusal_reason"].get<std::string>().find(
            "divergence premise") != std::string::npos);
  check_schema(rep);
}

TEST_CASE("config file merges under flags") {
  const std::filesystem::path dir = scratch_dir();
  const std::filesystem::path cfg_path = dir / "run.json";
  write_file(cfg_path,
             R"({"mean": {"family": "power", "p": 0.5}, "n": 500, "seed": 7})");

  RunConfig cfg = parse_args(
      {"hardy-constant", "--config", cfg_path.string(), "--n", "800"});
  CHECK(cfg.command == "hardy-constant");
  REQUIRE(cfg.mean.has_value());
  CHECK(cfg.mean->family == MeanFamily::power);
  CHECK(cfg.mean->p == 0.5);
  CHECK(cfg.n == 800);
  CHECK(cfg.seed == 7);
  CHECK(cfg.tol == 1e-3);

  CHECK_THROWS_AS(parse_args({"eval", "--config", (dir / "absent.json").string()}),
                  usage_error);
  write_file(dir / "broken.json", "{not json");
  CHECK_THROWS_AS(parse_args({"eval", "--config", (dir / "broken.json").string()}),
                  usage_error);
  write_file(dir / "extra.json", R"({"frobs": 3})");
  CHECK_THROWS_AS(parse_args({"eval", "--config", (dir / "extra.json").string()}),
                  usage_error);
  CHECK_THROWS_AS(parse_args({"eval", "--config", cfg_path.string(), "--config",
                              cfg_path.string()}),
                  usage_error);
}

TEST_CASE("every command round-trips through its own config echo") {
  std::vector<RunConfig> cases;

  RunConfig c;
  c.command = "eval";
  c.mean = MeanSpec::harmonic();
  c.vector_arg = {1.0, 2.0, 4.0};
  cases.push_back(c);

  c = RunConfig{};
  c.command = "eval";
  c.mean = MeanSpec::quasiarithmetic("log(x)");
  c.vector_arg = {1.0, 4.0};
  cases.push_back(c);

  c = RunConfig{};
  c.command = "axioms";
  c.mean = MeanSpec::power(0.5);
  c.n = 200;
  c.seed = 5;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "hardy-constant";
  c.mean = MeanSpec::geometric();
  c.n = 1000;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "hardy-ratio";
  c.mean = MeanSpec::max();
  c.seq = SeqSpec::explicit_list({4.0, 3.0, 2.0, 1.0});
  c.n = 4;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "ratios";
  c.mean = MeanSpec::power(-2.0);
  c.seq = SeqSpec::powerlaw(0.5);
  c.n = 100;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "ratios";
  c.mean = MeanSpec::min();
  c.seq = SeqSpec::constant(2.5);
  c.n = 50;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "test-hardy";
  c.mean = MeanSpec::arithmetic();
  c.seq = SeqSpec::custom("1/x");
  c.n = 2000;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "test-weak-hardy";
  c.mean = MeanSpec::arithmetic();
  c.seq = SeqSpec::harmonic();
  c.n = 2000;
  c.s_grid = {0.5, 2.0};
  cases.push_back(c);

  c = RunConfig{};
  c.command = "lemma1";
  c.mean = MeanSpec::arithmetic();
  c.seq = SeqSpec::harmonic();
  c.n = 2000;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "counterexample";
  c.mean = MeanSpec::arithmetic();
  c.seq = SeqSpec::geometric(0.5);
  c.n = 100;
  cases.push_back(c);

  c = RunConfig{};
  c.command = "counterexample";
  c.mean = MeanSpec::max();
  c.seq = SeqSpec::harmonic();
  c.n = 2000;
  cases.push_back(c);

  for (const RunConfig& cfg : cases) {
    INFO(cfg.command);
    const ordered_json first = dispatch(cfg);
    check_schema(first);

    RunConfig rebuilt;
    rebuilt.command = first["command"].get<std::string>();
    apply_config_object(rebuilt, first["config"]);
    const ordered_json second = dispatch(rebuilt);
    CHECK(first.dump() == second.dump());
  }
}

TEST_CASE("csv trajectories print header and exact values") {
  CliRun r = run({"hardy-constant", "--mean", "min", "--n", "1000", "--output",
                  "csv"});
  CHECK(r.code == 0);
  CHECK(r.out == "n,value\n1000,1\n");

  CliRun ratios = run({"ratios", "--mean", "min", "--seq", "constant:2",
                       "--n", "5", "--output", "csv"});
  CHECK(ratios.code == 0);
  CHECK(ratios.out == "n,value\n1,1\n2,1\n3,1\n4,1\n5,1\n");
}

TEST_CASE("csv partition and construction tables parse back") {
  CliRun part = run({"lemma1", "--mean", "arithmetic", "--seq", "harmonic",
                     "--n", "1000", "--output", "csv"});
  CHECK(part.code == 0);
  std::vector<std::string> lines = split_lines(part.out);
  REQUIRE(lines.size() >= 2);
  CHECK(lines[0] == "k,boundary,weight,inf_c,r_block");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 4);
  }

  CliRun cex = run({"counterexample", "--mean", "arithmetic", "--seq",
                    "harmonic", "--n", "100", "--output", "csv"});
  CHECK(cex.code == 0);
  lines = split_lines(cex.out);
  REQUIRE(lines.size() == 101);
  CHECK(lines[0] == "n,b_n,sum_b,mean_sum,certificate");
  const std::string& last = lines.back();
  CHECK(last.rfind("100,", 0) == 0);
  CHECK(last.back() == '1');
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::stringstream ss(lines[i]);
    std::string field;
    int count = 0;
    while (std::getline(ss, field, ',')) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      CHECK(end != field.c_str());
      CHECK(std::isfinite(v));
      ++count;
    }
    CHECK(count == 5);
  }
}

TEST_CASE("--out writes the report to a file and keeps stdout quiet") {
  const std::filesystem::path dir = scratch_dir();
  const std::filesystem::path json_path = dir / "report.json";
  CliRun r = run({"eval", "--mean", "arithmetic", "--vector", "2,4", "--out",
                  json_path.string()});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(json_path);
  REQUIRE(in.good());
  std::stringstream buf;
  buf << in.rdbuf();
  const ordered_json rep = ordered_json::parse(buf.str());
  CHECK(rep["result"]["value"].get<double>() == 3.0);

  const std::filesystem::path csv_path = dir / "table.csv";
  CliRun csv = run({"ratios", "--mean", "min", "--seq", "constant:2", "--n",
                    "3", "--output", "csv", "--out", csv_path.string()});
  CHECK(csv.code == 0);
  CHECK(csv.out.empty());
  std::ifstream cin_(csv_path);
  REQUIRE(cin_.good());
  std::stringstream cbuf;
  cbuf << cin_.rdbuf();
  CHECK(cbuf.str() == "n,value\n1,1\n2,1\n3,1\n");
}

TEST_CASE("checkpoint step env var feeds the cli") {
  REQUIRE(setenv("HARDYLAB_CHECKPOINTS", "1.0", 1) == 0);
  CliRun r = run({"hardy-constant", "--mean", "min", "--n", "10000"});
  CHECK(r.code == 0);
  const ordered_json rep = ordered_json::parse(r.out);
  CHECK(rep["config"]["checkpoint_step"].get<double>() == 1.0);
  CHECK(rep["result"]["trajectory"].size() == 2);

  REQUIRE(setenv("HARDYLAB_CHECKPOINTS", "abc", 1) == 0);
  CHECK(run({"hardy-constant", "--mean", "min", "--n", "1000"}).code == 2);
  REQUIRE(unsetenv("HARDYLAB_CHECKPOINTS") == 0);
}
