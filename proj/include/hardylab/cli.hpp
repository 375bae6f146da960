#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardylab/mean.hpp"
#include "hardylab/sequence.hpp"

namespace hardylab {

using ordered_json = nlohmann::ordered_json;

/// Fully resolved run description. Defaults are overridden by a config file,
/// which is overridden by flags; every report echoes the resolved values so
/// a run can be reproduced from its own output.
struct RunConfig {
  std::string command;
  std::optional<MeanSpec> mean;
  std::optional<SeqSpec> seq;
  std::vector<double> vector_arg;          // eval only
  std::uint64_t n = 100000;
  double tol = 1e-3;
  std::vector<double> s_grid = {0.5, 1.0, 2.0};
  std::uint64_t seed = 42;
  std::string output = "json";             // json | csv
  std::string out_path;                    // empty = standard output
  double checkpoint_step = 0.5;            // from HARDYLAB_CHECKPOINTS
};

/// Parses argv (program name excluded): first bare token is the command,
/// the rest are --flag value pairs. --config FILE merges a JSON config under
/// the flags. Throws usage_error on anything malformed.
RunConfig parse_args(const std::vector<std::string>& args);

/// The resolved-config echo embedded in every report.
ordered_json config_json(const RunConfig& cfg);

/// Restores a RunConfig from an echoed config object (command comes
/// separately). Used by --config and by the reproduce-from-report path.
void apply_config_object(RunConfig& cfg, const ordered_json& j);

/// Runs one command and returns the full JSON report
/// {"command", "config", "result"}. CSV-mode rendering happens in run_cli.
ordered_json dispatch(const RunConfig& cfg);

/// Full front end: parse, dispatch, render (JSON or CSV), write to out_path
/// or `out`. Returns the process exit code: 0 completed analysis (refusals
/// included), 2 usage or parse error, 3 numerical fault.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace hardylab
