#include "hardylab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "hardylab/axioms.hpp"
#include "hardylab/blocks.hpp"
#include "hardylab/counterexample.hpp"
#include "hardylab/errors.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/report_io.hpp"

namespace hardylab {

namespace {

const std::set<std::string> kCommands = {
    "eval",       "axioms", "hardy-constant", "hardy-ratio",      "ratios",
    "test-hardy", "lemma1", "counterexample", "test-weak-hardy"};

const char kUsage[] =
    "usage: hardylab <command> [flags]\n"
    "\n"
    "commands:\n"
    "  eval             evaluate a mean on a vector (--mean, --vector)\n"
    "  axioms           sample the six mean axioms (--mean; --n = trials)\n"
    "  hardy-constant   estimate the Hardy constant via n*M(1,1/2,...,1/n)\n"
    "  hardy-ratio      summed prefix means over summed terms (--mean, --seq)\n"
    "  ratios           materialize c_n = M(a_1..a_n)/a_n (--mean, --seq)\n"
    "  test-hardy       divergent-sum + unbounded-ratio premise test\n"
    "  test-weak-hardy  premise test plus epsilon and damped-series scans\n"
    "  lemma1           block partition and damping sequence construction\n"
    "  counterexample   full certified construction (refuses when unsound)\n"
    "\n"
    "flags:\n"
    "  --mean F         arithmetic|geometric|harmonic|min|max|power:P|\n"
    "                   quasiarithmetic:EXPR|file:PATH\n"
    "  --seq R          harmonic|powerlaw:A|constant:V|geometric:Q|\n"
    "                   explicit:V1,V2,...|custom:EXPR\n"
    "  --vector LIST    comma-separated positive reals (eval only)\n"
    "  --n N            horizon / trial count (default 100000)\n"
    "  --tol T          convergence tolerance (hardy-constant only)\n"
    "  --s-grid LIST    damping exponents (test-weak-hardy only)\n"
    "  --seed S         RNG seed for axiom sampling (default 42)\n"
    "  --output M       json (default) or csv\n"
    "  --out PATH       write the report to PATH atomically\n"
    "  --config PATH    JSON config merged under the flags\n"
    "\n"
    "environment: HARDYLAB_CHECKPOINTS overrides the checkpoint exponent "
    "step (default 0.5)\n"
    "exit codes: 0 completed analysis (refusals included), 2 usage error, "
    "3 numerical fault\n";

double parse_double_arg(const std::string& s, const char* what) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v)) {
    throw usage_error(std::string(what) + ": not a finite number: \"" + s + "\"");
  }
  return v;
}

std::uint64_t parse_u64_arg(const std::string& s, const char* what) {
  if (s.empty() || s[0] == '-' || s[0] == '+') {
    throw usage_error(std::string(what) + ": not a natural number: \"" + s + "\"");
  }
  const char* begin = s.c_str();
  char* end = nullptr;
  const unsigned long long v = std::strtoull(begin, &end, 10);
  if (end == begin || *end != '\0') {
    throw usage_error(std::string(what) + ": not a natural number: \"" + s + "\"");
  }
  return v;
}

std::vector<double> parse_list_arg(const std::string& s, const char* what) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double_arg(item, what));
  if (out.empty()) throw usage_error(std::string(what) + ": empty list");
  return out;
}

MeanSpec parse_mean_arg(const std::string& s) {
  const std::size_t colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string param =
      colon == std::string::npos ? std::string() : s.substr(colon + 1);
  if (head == "file") {
    if (param.empty()) throw usage_error("--mean file: requires a path");
    std::ifstream in(param);
    if (!in) throw usage_error("cannot read mean spec file: " + param);
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw usage_error("mean spec file is not valid JSON: " + std::string(e.what()));
    }
    return mean_spec_from_json(j);
  }
  if (head == "arithmetic" || head == "geometric" || head == "harmonic" ||
      head == "min" || head == "max") {
    if (!param.empty()) throw usage_error("mean family " + head + " takes no parameter");
    if (head == "arithmetic") return MeanSpec::arithmetic();
    if (head == "geometric") return MeanSpec::geometric();
    if (head == "harmonic") return MeanSpec::harmonic();
    if (head == "min") return MeanSpec::min();
    return MeanSpec::max();
  }
  if (head == "power") {
    if (param.empty()) throw usage_error("power mean requires an exponent: power:P");
    return MeanSpec::power(parse_double_arg(param, "power exponent"));
  }
  if (head == "quasiarithmetic") {
    if (param.empty()) {
      throw usage_error("quasiarithmetic mean requires a generator: quasiarithmetic:EXPR");
    }
    return MeanSpec::quasiarithmetic(param);
  }
  throw usage_error("unknown mean family \"" + head + "\"");
}

SeqSpec parse_seq_arg(const std::string& s) {
  const std::size_t colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string param =
      colon == std::string::npos ? std::string() : s.substr(colon + 1);
  if (head == "harmonic") {
    if (!param.empty()) throw usage_error("sequence rule harmonic takes no parameter");
    return SeqSpec::harmonic();
  }
  if (head == "powerlaw") {
    if (param.empty()) throw usage_error("powerlaw requires an exponent: powerlaw:A");
    return SeqSpec::powerlaw(parse_double_arg(param, "powerlaw exponent"));
  }
  if (head == "constant") {
    if (param.empty()) throw usage_error("constant requires a value: constant:V");
    return SeqSpec::constant(parse_double_arg(param, "constant value"));
  }
  if (head == "geometric") {
    if (param.empty()) throw usage_error("geometric requires a ratio: geometric:Q");
    return SeqSpec::geometric(parse_double_arg(param, "geometric ratio"));
  }
  if (head == "explicit") {
    if (param.empty()) throw usage_error("explicit requires values: explicit:V1,V2,...");
    return SeqSpec::explicit_list(parse_list_arg(param, "explicit values"));
  }
  if (head == "custom") {
    if (param.empty()) throw usage_error("custom requires an expression: custom:EXPR");
    return SeqSpec::custom(param);
  }
  throw usage_error("unknown sequence rule \"" + head + "\"");
}

struct FlagsSeen {
  bool tol = false;
  bool s_grid = false;
};

void validate_config(const RunConfig& cfg, const FlagsSeen& seen) {
  if (!kCommands.contains(cfg.command)) {
    throw usage_error("unknown command \"" + cfg.command +
                      "\" (run with --help for the list)");
  }
  if (!cfg.mean.has_value()) throw usage_error(cfg.command + " requires --mean");

  const bool needs_seq = cfg.command == "hardy-ratio" || cfg.command == "ratios" ||
                         cfg.command == "test-hardy" ||
                         cfg.command == "test-weak-hardy" ||
                         cfg.command == "lemma1" || cfg.command == "counterexample";
  if (needs_seq && !cfg.seq.has_value()) {
    throw usage_error(cfg.command + " requires --seq");
  }
  if (!needs_seq && cfg.seq.has_value()) {
    throw usage_error(cfg.command + " does not take a sequence");
  }

  if (cfg.command == "eval") {
    if (cfg.vector_arg.empty()) throw usage_error("eval requires --vector");
    for (const double v : cfg.vector_arg) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw usage_error("--vector entries must be strictly positive and finite");
      }
    }
  } else if (!cfg.vector_arg.empty()) {
    throw usage_error("--vector is only valid with eval");
  }

  if (seen.tol && cfg.command != "hardy-constant") {
    throw usage_error("--tol is only valid with hardy-constant");
  }
  if (seen.s_grid && cfg.command != "test-weak-hardy") {
    throw usage_error("--s-grid is only valid with test-weak-hardy");
  }

  if (cfg.output != "json" && cfg.output != "csv") {
    throw usage_error("--output must be json or csv");
  }
  if (cfg.output == "csv" &&
      (cfg.command == "eval" || cfg.command == "axioms" ||
       cfg.command == "test-hardy" || cfg.command == "test-weak-hardy")) {
    throw usage_error("csv output is not available for " + cfg.command);
  }

  if (cfg.n == 0) throw usage_error("--n must be at least 1");
  if (!(cfg.tol > 0.0)) throw usage_error("tol must be positive");
  if (cfg.s_grid.empty()) throw usage_error("s_grid must be nonempty");
  for (const double s : cfg.s_grid) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw usage_error("s_grid entries must be positive and finite");
    }
  }
}

/// Case dispatch shared by lemma1 and the counterexample pipeline: analytic
/// infimum class when the rule knows it, numeric threshold otherwise.
BlockPartition build_partition(const SeqSpec& seq, std::span<const double> a,
                               std::span<const double> c, std::uint64_t N,
                               bool* used_case_one) {
  bool inf_positive = false;
  switch (seq.infimum_class()) {
    case SeqSpec::InfClass::positive: inf_positive = true; break;
    case SeqSpec::InfClass::zero: inf_positive = false; break;
    case SeqSpec::InfClass::unknown: {
      const double amax = *std::max_element(a.begin(), a.end());
      const double amin = *std::min_element(a.begin(), a.end());
      inf_positive = amin > 1e-9 * amax;
      break;
    }
  }
  if (used_case_one != nullptr) *used_case_one = inf_positive;
  return inf_positive ? build_blocks_case1(c, a, N) : build_blocks_case2(a, c, N);
}

struct CommandOutput {
  ordered_json result;
  std::string csv;  // filled only in csv mode
};

CommandOutput run_command(const RunConfig& cfg) {
  CommandOutput out;
  const bool want_csv = cfg.output == "csv";

  if (cfg.command == "eval") {
    out.result["value"] = eval_mean(*cfg.mean, cfg.vector_arg);
    return out;
  }

  if (cfg.command == "axioms") {
    out.result = axioms_json(check_axioms(*cfg.mean, cfg.n, DimRange{}, cfg.seed));
    return out;
  }

  if (cfg.command == "hardy-constant") {
    const HardyEstimate est =
        hardy_constant_estimate(*cfg.mean, cfg.n, cfg.tol, cfg.checkpoint_step);
    out.result = estimate_json(est);
    if (want_csv) {
      std::ostringstream os;
      trajectory_csv(os, est.trajectory);
      out.csv = os.str();
    }
    return out;
  }

  if (cfg.command == "hardy-ratio") {
    const HardyRatio r = hardy_ratio(*cfg.mean, *cfg.seq, cfg.n);
    out.result = ratio_json(r);
    if (want_csv) {
      std::ostringstream os;
      trajectory_csv(os, r.trajectory);
      out.csv = os.str();
    }
    return out;
  }

  if (cfg.command == "ratios") {
    const SeriesBuffer buf = materialize(*cfg.seq, cfg.n);
    const std::vector<double> c = ratio_sequence(*cfg.mean, buf.terms);
    out.result["n"] = cfg.n;
    out.result["first"] = c.front();
    out.result["last"] = c.back();
    out.result["min"] = *std::min_element(c.begin(), c.end());
    out.result["max"] = *std::max_element(c.begin(), c.end());
    ordered_json cps = ordered_json::array();
    for (std::uint64_t n = 1; n <= cfg.n; n *= 10) {
      cps.push_back(ordered_json::array({n, c[n - 1]}));
    }
    if (cfg.n != 1) {
      bool has_final = false;
      for (std::uint64_t n = 1; n <= cfg.n; n *= 10) has_final = has_final || n == cfg.n;
      if (!has_final) cps.push_back(ordered_json::array({cfg.n, c.back()}));
    }
    out.result["checkpoints"] = std::move(cps);
    out.result["epsilon"] = epsilon_json(nearly_increasing_epsilon(c));
    if (want_csv) {
      std::ostringstream os;
      series_csv(os, c);
      out.csv = os.str();
    }
    return out;
  }

  if (cfg.command == "test-hardy") {
    out.result = verdict_json(hardy_divergence_test(*cfg.mean, *cfg.seq, cfg.n));
    return out;
  }

  if (cfg.command == "test-weak-hardy") {
    const TestVerdict premise = hardy_divergence_test(*cfg.mean, *cfg.seq, cfg.n);
    const SeriesBuffer buf = materialize(*cfg.seq, cfg.n);
    const std::vector<double> c = ratio_sequence(*cfg.mean, buf.terms);
    const std::vector<double> m = prefix_means(*cfg.mean, buf.terms);
    const std::vector<DampedScanResult> scans =
        damped_series_scan(buf.terms, m, cfg.s_grid);
    out.result["verdict"] = to_string(premise.holds);
    out.result["premise"] = verdict_json(premise);
    out.result["epsilon"] = epsilon_json(nearly_increasing_epsilon(c));
    out.result["damped_scan"] = damped_json(scans);
    out.result["note"] =
        "verdict mirrors the divergence premise; epsilon and damped scans "
        "are side diagnostics";
    return out;
  }

  if (cfg.command == "lemma1") {
    const SeriesBuffer buf = materialize(*cfg.seq, cfg.n);
    const std::vector<double> c = ratio_sequence(*cfg.mean, buf.terms);
    bool case_one = false;
    const BlockPartition p = build_partition(*cfg.seq, buf.terms, c, cfg.n, &case_one);
    const RSequence base = emit_r(p.r_boundaries(), p.r_values(), cfg.n);
    const RSequence strict = strictify(base);
    out.result["partition"] = partition_json(p);
    ordered_json rj;
    rj["strictified"] = strict.strictified;
    ordered_json head = ordered_json::array();
    for (std::size_t i = 0; i < std::min<std::size_t>(16, strict.values.size()); ++i) {
      head.push_back(strict.values[i]);
    }
    rj["head"] = std::move(head);
    rj["last"] = strict.values.back();
    out.result["r"] = std::move(rj);
    if (want_csv) {
      std::ostringstream os;
      partition_csv(os, p);
      out.csv = os.str();
    }
    return out;
  }

  if (cfg.command == "counterexample") {
    const CounterexampleReport rep =
        counterexample(*cfg.mean, *cfg.seq, cfg.n, cfg.seed);
    out.result = counterexample_json(rep);
    if (want_csv) {
      std::ostringstream os;
      counterexample_csv(os, rep);
      out.csv = os.str();
    }
    return out;
  }

  throw usage_error("unknown command \"" + cfg.command + "\"");
}

}  // namespace

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  FlagsSeen seen;
  std::vector<std::pair<std::string, std::string>> flags;
  std::string config_path;

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& tok = args[i];
    if (tok.rfind("--", 0) == 0) {
      if (i + 1 >= args.size()) throw usage_error("flag " + tok + " needs a value");
      if (tok == "--config") {
        if (!config_path.empty()) throw usage_error("--config given twice");
        config_path = args[i + 1];
      } else {
        flags.emplace_back(tok, args[i + 1]);
      }
      ++i;
    } else if (cfg.command.empty()) {
      cfg.command = tok;
    } else {
      throw usage_error("unexpected argument \"" + tok + "\"");
    }
  }
  if (cfg.command.empty()) throw usage_error("missing command (run with --help)");

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw usage_error("cannot read config file: " + config_path);
    ordered_json j;
    try {
      j = ordered_json::parse(in);
    } catch (const std::exception& e) {
      throw usage_error("config file is not valid JSON: " + std::string(e.what()));
    }
    apply_config_object(cfg, j);
  }

  for (const auto& [key, value] : flags) {
    if (key == "--mean") {
      cfg.mean = parse_mean_arg(value);
    } else if (key == "--seq") {
      cfg.seq = parse_seq_arg(value);
    } else if (key == "--vector") {
      cfg.vector_arg = parse_list_arg(value, "--vector");
    } else if (key == "--n") {
      cfg.n = parse_u64_arg(value, "--n");
    } else if (key == "--tol") {
      cfg.tol = parse_double_arg(value, "--tol");
      seen.tol = true;
    } else if (key == "--s-grid") {
      cfg.s_grid = parse_list_arg(value, "--s-grid");
      seen.s_grid = true;
    } else if (key == "--seed") {
      cfg.seed = parse_u64_arg(value, "--seed");
    } else if (key == "--output") {
      cfg.output = value;
    } else if (key == "--out") {
      if (value.empty()) throw usage_error("--out requires a path");
      cfg.out_path = value;
    } else {
      throw usage_error("unknown flag \"" + key + "\"");
    }
  }

  cfg.checkpoint_step = checkpoint_step_from_env();
  validate_config(cfg, seen);
  return cfg;
}

ordered_json config_json(const RunConfig& cfg) {
  ordered_json j;
  j["mean"] = cfg.mean.has_value() ? mean_spec_json(*cfg.mean) : ordered_json(nullptr);
  j["seq"] = cfg.seq.has_value() ? seq_spec_json(*cfg.seq) : ordered_json(nullptr);
  j["vector"] = cfg.vector_arg;
  j["n"] = cfg.n;
  j["tol"] = cfg.tol;
  j["s_grid"] = cfg.s_grid;
  j["seed"] = cfg.seed;
  j["output"] = cfg.output;
  j["checkpoint_step"] = cfg.checkpoint_step;
  return j;
}

void apply_config_object(RunConfig& cfg, const ordered_json& j) {
  if (!j.is_object()) throw usage_error("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") {
      if (!value.is_string()) throw usage_error("config command must be a string");
      cfg.command = value.get<std::string>();
    } else if (key == "mean") {
      cfg.mean = value.is_null() ? std::optional<MeanSpec>()
                                 : std::optional<MeanSpec>(mean_spec_from_json(value));
    } else if (key == "seq") {
      cfg.seq = value.is_null() ? std::optional<SeqSpec>()
                                : std::optional<SeqSpec>(seq_spec_from_json(value));
    } else if (key == "vector") {
      if (!value.is_array()) throw usage_error("config vector must be an array");
      cfg.vector_arg = value.get<std::vector<double>>();
    } else if (key == "n") {
      if (!value.is_number_unsigned()) throw usage_error("config n must be a natural");
      cfg.n = value.get<std::uint64_t>();
    } else if (key == "tol") {
      if (!value.is_number()) throw usage_error("config tol must be a number");
      cfg.tol = value.get<double>();
    } else if (key == "s_grid") {
      if (!value.is_array()) throw usage_error("config s_grid must be an array");
      cfg.s_grid = value.get<std::vector<double>>();
    } else if (key == "seed") {
      if (!value.is_number_unsigned()) throw usage_error("config seed must be a natural");
      cfg.seed = value.get<std::uint64_t>();
    } else if (key == "output") {
      if (!value.is_string()) throw usage_error("config output must be a string");
      cfg.output = value.get<std::string>();
    } else if (key == "checkpoint_step") {
      if (!value.is_number()) throw usage_error("config checkpoint_step must be a number");
      cfg.checkpoint_step = value.get<double>();
    } else {
      throw usage_error("unknown config key \"" + key + "\"");
    }
  }
}

ordered_json dispatch(const RunConfig& cfg) {
  ordered_json report;
  report["command"] = cfg.command;
  report["config"] = config_json(cfg);
  report["result"] = run_command(cfg).result;
  return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  for (const std::string& a : args) {
    if (a == "--help" || a == "-h") {
      out << kUsage;
      return 0;
    }
  }
  try {
    const RunConfig cfg = parse_args(args);
    std::string payload;
    if (cfg.output == "csv") {
      payload = run_command(cfg).csv;
    } else {
      ordered_json report;
      report["command"] = cfg.command;
      report["config"] = config_json(cfg);
      report["result"] = run_command(cfg).result;
      payload = report.dump(2);
      payload.push_back('\n');
    }
    if (!cfg.out_path.empty()) {
      write_atomic(cfg.out_path, payload);
    } else {
      out << payload;
    }
    return 0;
  } catch (const usage_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "numerical fault: " << e.what() << '\n';
    return 3;
  }
}

}  // namespace hardylab
