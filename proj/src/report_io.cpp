#include "hardylab/report_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hardylab/errors.hpp"

namespace hardylab {

namespace {

constexpr std::size_t kArrayCap = 64;  // JSON reports stay skimmable; CSV is the full dump

template <typename T>
ordered_json capped(const std::vector<T>& xs) {
  ordered_json arr = ordered_json::array();
  const std::size_t n = std::min(xs.size(), kArrayCap);
  for (std::size_t i = 0; i < n; ++i) arr.push_back(xs[i]);
  return arr;
}

ordered_json trajectory_json(
    std::span<const std::pair<std::uint64_t, double>> points) {
  ordered_json arr = ordered_json::array();
  for (const auto& [n, v] : points) arr.push_back(ordered_json::array({n, v}));
  return arr;
}

double require_number(const ordered_json& j, const char* key,
                      const char* owner) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw usage_error(std::string(owner) + " requires numeric field \"" + key + "\"");
  }
  return j.at(key).get<double>();
}

std::string require_string(const ordered_json& j, const char* key,
                           const char* owner) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw usage_error(std::string(owner) + " requires string field \"" + key + "\"");
  }
  return j.at(key).get<std::string>();
}

}  // namespace

ordered_json mean_spec_json(const MeanSpec& spec) {
  ordered_json j;
  switch (spec.family) {
    case MeanFamily::arithmetic: j["family"] = "arithmetic"; break;
    case MeanFamily::geometric: j["family"] = "geometric"; break;
    case MeanFamily::harmonic: j["family"] = "harmonic"; break;
    case MeanFamily::power:
      j["family"] = "power";
      j["p"] = spec.p;
      break;
    case MeanFamily::min: j["family"] = "min"; break;
    case MeanFamily::max: j["family"] = "max"; break;
    case MeanFamily::quasiarithmetic:
      j["family"] = "quasiarithmetic";
      j["generator"] = spec.generator_text;
      break;
  }
  return j;
}

MeanSpec mean_spec_from_json(const ordered_json& j) {
  if (!j.is_object()) throw usage_error("mean spec must be a JSON object");
  const std::string family = require_string(j, "family", "mean spec");
  if (family == "arithmetic") return MeanSpec::arithmetic();
  if (family == "geometric") return MeanSpec::geometric();
  if (family == "harmonic") return MeanSpec::harmonic();
  if (family == "min") return MeanSpec::min();
  if (family == "max") return MeanSpec::max();
  if (family == "power") return MeanSpec::power(require_number(j, "p", "power mean"));
  if (family == "quasiarithmetic") {
    return MeanSpec::quasiarithmetic(
        require_string(j, "generator", "quasiarithmetic mean"));
  }
  throw usage_error("unknown mean family \"" + family + "\"");
}

ordered_json seq_spec_json(const SeqSpec& seq) {
  ordered_json j;
  switch (seq.rule) {
    case SeqRule::harmonic: j["rule"] = "harmonic"; break;
    case SeqRule::powerlaw:
      j["rule"] = "powerlaw";
      j["alpha"] = seq.alpha;
      break;
    case SeqRule::constant:
      j["rule"] = "constant";
      j["value"] = seq.value;
      break;
    case SeqRule::geometric:
      j["rule"] = "geometric";
      j["q"] = seq.q;
      break;
    case SeqRule::explicit_list:
      j["rule"] = "explicit";
      j["values"] = seq.terms;
      break;
    case SeqRule::custom:
      j["rule"] = "custom";
      j["expr"] = seq.expr_text;
      break;
  }
  return j;
}

SeqSpec seq_spec_from_json(const ordered_json& j) {
  if (!j.is_object()) throw usage_error("sequence spec must be a JSON object");
  const std::string rule = require_string(j, "rule", "sequence spec");
  if (rule == "harmonic") return SeqSpec::harmonic();
  if (rule == "powerlaw") return SeqSpec::powerlaw(require_number(j, "alpha", "powerlaw"));
  if (rule == "constant") return SeqSpec::constant(require_number(j, "value", "constant"));
  if (rule == "geometric") return SeqSpec::geometric(require_number(j, "q", "geometric"));
  if (rule == "explicit") {
    if (!j.contains("values") || !j.at("values").is_array()) {
      throw usage_error("explicit sequence requires array field \"values\"");
    }
    std::vector<double> vals;
    for (const auto& v : j.at("values")) {
      if (!v.is_number()) throw usage_error("explicit sequence values must be numbers");
      vals.push_back(v.get<double>());
    }
    return SeqSpec::explicit_list(std::move(vals));
  }
  if (rule == "custom") return SeqSpec::custom(require_string(j, "expr", "custom sequence"));
  throw usage_error("unknown sequence rule \"" + rule + "\"");
}

ordered_json axioms_json(const PropertyReport& rep) {
  ordered_json j;
  j["seed"] = rep.seed;
  j["trials"] = rep.trials;
  j["tolerance"] = rep.tolerance;
  j["all_pass"] = rep.all_pass;
  ordered_json arr = ordered_json::array();
  for (const AxiomResult& a : rep.axioms) {
    ordered_json e;
    e["name"] = a.name;
    e["pass"] = a.pass;
    e["worst_violation"] = a.worst_violation;
    e["trials"] = a.trials;
    if (a.witness.has_value()) {
      const AxiomWitness& w = *a.witness;
      ordered_json wj;
      wj["x"] = w.x;
      wj["y"] = w.y;
      wj["scalar"] = w.scalar;
      wj["lhs"] = w.lhs;
      wj["rhs"] = w.rhs;
      wj["violation"] = w.violation;
      wj["trial"] = w.trial;
      e["witness"] = std::move(wj);
    } else {
      e["witness"] = nullptr;
    }
    arr.push_back(std::move(e));
  }
  j["axioms"] = std::move(arr);
  return j;
}

ordered_json estimate_json(const HardyEstimate& est) {
  ordered_json j;
  j["final"] = est.final_value;
  j["verdict"] = to_string(est.verdict);
  j["tol"] = est.tol;
  j["checkpoint_step"] = est.checkpoint_step;
  j["last_drift"] = est.last_drift;
  ordered_json fit;
  fit["slope"] = est.fit_slope;
  fit["intercept"] = est.fit_intercept;
  fit["r_squared"] = est.fit_r_squared;
  fit["modeled_growth"] = est.modeled_growth;
  j["fit"] = std::move(fit);
  j["trajectory"] = trajectory_json(est.trajectory);
  return j;
}

ordered_json ratio_json(const HardyRatio& ratio) {
  ordered_json j;
  j["ratio"] = ratio.ratio;
  j["numerator"] = ratio.numerator;
  j["denominator"] = ratio.denominator;
  j["n"] = ratio.n;
  j["trajectory"] = trajectory_json(ratio.trajectory);
  return j;
}

ordered_json verdict_json(const TestVerdict& v) {
  ordered_json j;
  j["test"] = v.test;
  j["holds"] = to_string(v.holds);
  j["evidence"] = v.evidence;
  return j;
}

ordered_json epsilon_json(const EpsilonEstimate& e) {
  ordered_json j;
  j["epsilon"] = e.epsilon;
  j["max_index"] = e.max_index;
  j["dip_index"] = e.dip_index;
  return j;
}

ordered_json damped_json(std::span<const DampedScanResult> scans) {
  ordered_json arr = ordered_json::array();
  for (const DampedScanResult& r : scans) {
    ordered_json e;
    e["s"] = r.s;
    e["verdict"] = to_string(r.verdict);
    e["evidence"] = r.evidence;
    arr.push_back(std::move(e));
  }
  return arr;
}

ordered_json partition_json(const BlockPartition& p) {
  ordered_json j;
  j["case"] = p.kind == BlockCase::case_one ? "case_one" : "case_two";
  j["blocks"] = p.block_weight.size();
  j["boundaries"] = capped(p.boundaries);
  j["block_weight"] = capped(p.block_weight);
  j["block_inf_c"] = capped(p.block_inf_c);
  j["r_block"] = capped(p.r_block);
  j["arrays_truncated"] = p.boundaries.size() > kArrayCap;
  j["short_partition"] = p.short_partition;
  if (p.kind == BlockCase::case_two) {
    j["super_boundaries"] = capped(p.super_boundaries);
    j["super_r"] = capped(p.super_r);
    if (p.derived != nullptr) j["derived"] = partition_json(*p.derived);
  }
  return j;
}

ordered_json counterexample_json(const CounterexampleReport& rep) {
  ordered_json j;
  j["verdict"] = to_string(rep.verdict);
  j["n"] = rep.n;
  j["seed"] = rep.seed;
  j["axioms"] = axioms_json(rep.axioms);
  j["divergence"] = rep.divergence.test.empty() ? ordered_json(nullptr)
                                                : verdict_json(rep.divergence);
  if (rep.verdict == CexVerdict::refused) {
    j["refusal_reason"] = rep.refusal_reason;
    return j;
  }

  j["n0"] = rep.n0;
  j["bound_on_a"] = rep.bound_on_a;
  j["bound_verified"] = rep.bound_verified;
  j["partition"] = partition_json(rep.partition);

  ordered_json certs;
  certs["checked"] = rep.certificates.checked;
  certs["violations"] = rep.certificates.violations;
  certs["first_violation_n"] = rep.certificates.first_violation_n;
  certs["worst_margin_rel"] = rep.certificates.worst_margin_rel;
  certs["lhs_at_worst"] = rep.certificates.lhs_at_worst;
  certs["rhs_at_worst"] = rep.certificates.rhs_at_worst;
  j["certificates"] = std::move(certs);

  ordered_json ids = ordered_json::array();
  const std::size_t id_count = std::min(rep.identities.size(), kArrayCap);
  for (std::size_t i = 0; i < id_count; ++i) {
    const IdentityBlock& b = rep.identities[i];
    ordered_json e;
    e["level"] = b.level;
    e["n_lo"] = b.n_lo;
    e["n_hi"] = b.n_hi;
    e["sum_ar"] = b.sum_ar;
    e["expected_ar"] = b.expected_ar;
    e["sum_acr"] = b.sum_acr;
    e["lower_acr"] = b.lower_acr;
    e["ar_ok"] = b.ar_ok;
    e["acr_ok"] = b.acr_ok;
    ids.push_back(std::move(e));
  }
  j["identities"] = std::move(ids);
  j["identity_bound_total"] = rep.identity_bound_total;

  j["sum_b_total"] = rep.sum_b_total;
  j["mean_sum_total"] = rep.mean_sum_total;
  j["r_strictly_decreasing"] = rep.r_strictly_decreasing;
  j["tail_stable"] = rep.tail_stable;
  j["tail_max_increment_rel"] = rep.tail_max_increment_rel;
  j["truncated_tail"] = rep.truncated_tail;

  ordered_json cps = ordered_json::array();
  for (std::uint64_t n = 1; n <= rep.n; n *= 10) {
    ordered_json e;
    e["n"] = n;
    e["a"] = rep.a[n - 1];
    e["c"] = rep.c[n - 1];
    e["r"] = rep.strict_r.values[n - 1];
    e["b"] = rep.b[n - 1];
    e["sum_b"] = rep.sum_b[n - 1];
    e["mean_of_b"] = rep.mean_of_b[n - 1];
    e["mean_sum"] = rep.mean_sums[n - 1];
    cps.push_back(std::move(e));
  }
  j["checkpoints"] = std::move(cps);
  j["notes"] = rep.notes;
  return j;
}

std::string format_g17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void series_csv(std::ostream& os, std::span<const double> values) {
  os << "n,value\n";
  for (std::size_t i = 0; i < values.size(); ++i) {
    os << (i + 1) << ',' << format_g17(values[i]) << '\n';
  }
}

void trajectory_csv(std::ostream& os,
                    std::span<const std::pair<std::uint64_t, double>> points) {
  os << "n,value\n";
  for (const auto& [n, v] : points) os << n << ',' << format_g17(v) << '\n';
}

void partition_csv(std::ostream& os, const BlockPartition& p) {
  os << "k,boundary,weight,inf_c,r_block\n";
  for (std::size_t k = 0; k < p.block_weight.size(); ++k) {
    os << k << ',' << p.boundaries[k + 1] << ',' << format_g17(p.block_weight[k])
       << ',' << format_g17(p.block_inf_c[k]) << ',' << format_g17(p.r_block[k])
       << '\n';
  }
}

void counterexample_csv(std::ostream& os, const CounterexampleReport& rep) {
  os << "n,b_n,sum_b,mean_sum,certificate\n";
  for (std::size_t i = 0; i < rep.b.size(); ++i) {
    os << (i + 1) << ',' << format_g17(rep.b[i]) << ',' << format_g17(rep.sum_b[i])
       << ',' << format_g17(rep.mean_sums[i]) << ','
       << int(rep.certificate_flags.empty() ? 1 : rep.certificate_flags[i]) << '\n';
  }
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw usage_error("cannot open output path: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.good()) throw usage_error("failed writing output path: " + path);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw usage_error("cannot move output into place at: " + path);
  }
}

}  // namespace hardylab
