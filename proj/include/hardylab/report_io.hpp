#pragma once

#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hardylab/axioms.hpp"
#include "hardylab/blocks.hpp"
#include "hardylab/counterexample.hpp"
#include "hardylab/hardy.hpp"
#include "hardylab/mean.hpp"
#include "hardylab/sequence.hpp"

namespace hardylab {

// Spec serialization round-trips exactly: only the defining fields appear,
// and the textual fields are echoed verbatim.
ordered_json mean_spec_json(const MeanSpec& spec);
ordered_json seq_spec_json(const SeqSpec& seq);
MeanSpec mean_spec_from_json(const ordered_json& j);
SeqSpec seq_spec_from_json(const ordered_json& j);

ordered_json axioms_json(const PropertyReport& rep);
ordered_json estimate_json(const HardyEstimate& est);
ordered_json ratio_json(const HardyRatio& ratio);
ordered_json verdict_json(const TestVerdict& v);
ordered_json epsilon_json(const EpsilonEstimate& e);
ordered_json damped_json(std::span<const DampedScanResult> scans);
ordered_json partition_json(const BlockPartition& p);
ordered_json counterexample_json(const CounterexampleReport& rep);

/// 17 significant digits: lossless text form of a double.
std::string format_g17(double x);

// CSV emitters. Headers are part of the format contract.
void series_csv(std::ostream& os, std::span<const double> values);  // n,value
void trajectory_csv(std::ostream& os,
                    std::span<const std::pair<std::uint64_t, double>> points);
void partition_csv(std::ostream& os, const BlockPartition& p);
void counterexample_csv(std::ostream& os, const CounterexampleReport& rep);

/// Writes via a temporary file and rename so readers never see a torn file.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace hardylab
