#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "bushy/dnc_builder.hpp"
#include "bushy/harness.hpp"
#include "bushy/toy_computation.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace bushy;

constexpr int kPass = 0;
constexpr int kViolation = 1;
constexpr int kConfigError = 2;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<std::uint64_t> workers;
  std::string out;
  std::string format = "json";
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment spec (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--trials", c.trials, "number of trials");
  cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)");
  cmd->add_option("--out", c.out, "write the report here instead of stdout");
  cmd->add_option("--format", c.format, "report format")->check(CLI::IsMember({"json", "csv"}));
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, e.what());
  }
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out);
  if (!file) throw ConfigError("--out", "cannot write " + out);
  file << text;
}

ExperimentSpec build_spec(ExperimentKind kind, const Common& c, json payload_override = nullptr) {
  json j = json::object();
  if (!c.config.empty()) j = read_json(c.config);
  if (!j.is_object()) throw ConfigError("config", "must be an object");
  if (!j.contains("kind")) j["kind"] = to_string(kind);
  if (j["kind"] != to_string(kind)) {
    throw ConfigError("config.kind", std::string("expected \"") + to_string(kind) + "\"");
  }
  if (c.seed) j["seed"] = *c.seed;
  if (c.trials) j["trials"] = *c.trials;
  if (c.workers) j["workers"] = *c.workers;
  if (!payload_override.is_null()) {
    json payload = j.contains("payload") ? j["payload"] : default_payload(kind);
    for (const auto& [k, v] : payload_override.items()) payload[k] = v;
    j["payload"] = payload;
  }
  return parse_spec(j);
}

int report(const ExperimentSpec& spec, const Common& c) {
  const StatsReport r = run_experiment(spec);
  emit(c.format == "csv" ? report_csv(r) : report_json(r), c.out);
  return r.pass ? kPass : kViolation;
}

void write_traces(const ExperimentSpec& spec, const std::string& path, std::uint64_t count) {
  std::ofstream file(path);
  if (!file) throw ConfigError("--trace", "cannot write " + path);
  for (std::uint64_t i = 0; i < count && i < spec.trials; ++i) {
    const std::uint64_t seed = trial_seed(spec.seed, i);
    const RunTrace t = spec.kind == ExperimentKind::kDncBounded
                           ? run_bounded_dnc(bounded_config_from_payload(spec.payload), seed)
                           : run_unbounded_dnc(unbounded_config_from_payload(spec.payload), seed);
    file << trace_to_json(t) << '\n';
  }
}

int audit_file(const std::string& path, std::uint64_t diag_steps, const Common& c) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open");
  const DiagonalTable table(ToyEnumeration::shipped(), diag_steps);
  json results = json::array();
  bool all_ok = true;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    RunTrace trace;
    try {
      trace = trace_from_json(line);
    } catch (const std::exception& e) {
      throw ConfigError(path + ":" + std::to_string(n), e.what());
    }
    const TraceAudit a = audit_trace(trace, &table);
    all_ok = all_ok && a.ok();
    json v = json::array();
    for (const auto& msg : a.violations) v.push_back(msg);
    results.push_back({{"line", n},
                       {"seed", trace.seed},
                       {"ok", a.ok()},
                       {"draws_checked", a.draws_checked},
                       {"witnesses_checked", a.witnesses_checked},
                       {"refutations_checked", a.refutations_checked},
                       {"lists_checked", a.lists_checked},
                       {"violations", v}});
  }
  std::string text;
  if (c.format == "csv") {
    std::ostringstream out;
    out << "line,seed,ok,draws_checked,witnesses_checked,refutations_checked,lists_checked,violations\n";
    for (const auto& r : results) {
      out << r["line"] << ',' << r["seed"] << ',' << r["ok"] << ',' << r["draws_checked"] << ','
          << r["witnesses_checked"] << ',' << r["refutations_checked"] << ','
          << r["lists_checked"] << ',' << r["violations"].size() << '\n';
    }
    text = out.str();
  } else {
    text = json({{"traces", results}, {"pass", all_ok}}).dump(2) + "\n";
  }
  emit(text, c.out);
  return all_ok ? kPass : kViolation;
}

int dump_diagonal(std::uint64_t steps, const Common& c) {
  const DiagonalTable table(ToyEnumeration::shipped(), steps);
  std::string text;
  if (c.format == "csv") {
    std::ostringstream out;
    out << "e,value,halt_step\n";
    for (std::size_t e = 0; e < table.size(); ++e) {
      const auto& entry = table.entry(e);
      out << e << ',' << (entry.value ? std::to_string(*entry.value) : "") << ','
          << (entry.value ? std::to_string(entry.halt_step) : "") << '\n';
    }
    text = out.str();
  } else {
    json j = json::object();
    for (std::size_t e = 0; e < table.size(); ++e) {
      const auto& entry = table.entry(e);
      j[std::to_string(e)] = entry.value ? json(*entry.value) : json(nullptr);
    }
    text = json({{"max_steps", steps}, {"diagonal", j}}).dump(2) + "\n";
  }
  emit(text, c.out);
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bushy: bushy-tree forcing experiments"};
  app.require_subcommand(1);

  Common walk_c, fw_c, dnc_c, dncu_c, family_c, lemmas_c, audit_c, diag_c;
  auto* walk = app.add_subcommand("walk", "random walk against a planted small set");
  add_common(walk, walk_c);
  auto* fireworks = app.add_subcommand("fireworks", "fireworks trap family stuck bound");
  add_common(fireworks, fw_c);

  std::string dnc_trace, dncu_trace;
  std::uint64_t dnc_trace_count = 10, dncu_trace_count = 10;
  auto* dnc = app.add_subcommand("dnc", "bounded DNC builder");
  add_common(dnc, dnc_c);
  dnc->add_option("--trace", dnc_trace, "write JSON-lines traces of the first runs");
  dnc->add_option("--trace-count", dnc_trace_count, "number of traces to write");
  auto* dncu = app.add_subcommand("dnc-unbounded", "unbounded DNC builder");
  add_common(dncu, dncu_c);
  dncu->add_option("--trace", dncu_trace, "write JSON-lines traces of the first runs");
  dncu->add_option("--trace-count", dncu_trace_count, "number of traces to write");

  unsigned family_m = 3;
  bool family_exact = false;
  std::uint64_t family_kmax = 2, family_imax = 6;
  auto* family = app.add_subcommand("family", "growth family table and audits");
  add_common(family, family_c);
  family->add_option("--m", family_m, "base offset m");
  family->add_flag("--exact", family_exact, "exact towers instead of the scaled family");
  family->add_option("--kmax", family_kmax, "largest level k");
  family->add_option("--imax", family_imax, "largest audited index i");

  auto* lemmas = app.add_subcommand("lemmas", "randomized lemma property suite");
  add_common(lemmas, lemmas_c);

  std::string audit_path;
  std::uint64_t audit_steps = 10000;
  auto* audit = app.add_subcommand("audit", "audit JSON-lines traces");
  add_common(audit, audit_c);
  audit->add_option("traces", audit_path, "trace file (one JSON trace per line)")
      ->required()
      ->check(CLI::ExistingFile);
  audit->add_option("--diag-steps", audit_steps, "step budget for the diagonal table");

  std::uint64_t diag_steps = 10000;
  auto* diag = app.add_subcommand("diag", "dump the diagonal table phi_e(e)");
  add_common(diag, diag_c);
  diag->add_option("--steps", diag_steps, "step budget");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kConfigError;
  }

  try {
    if (*walk) return report(build_spec(ExperimentKind::kWalkBound, walk_c), walk_c);
    if (*fireworks) return report(build_spec(ExperimentKind::kFireworksTrap, fw_c), fw_c);
    if (*dnc) {
      const auto spec = build_spec(ExperimentKind::kDncBounded, dnc_c);
      if (!dnc_trace.empty()) write_traces(spec, dnc_trace, dnc_trace_count);
      return report(spec, dnc_c);
    }
    if (*dncu) {
      const auto spec = build_spec(ExperimentKind::kDncUnbounded, dncu_c);
      if (!dncu_trace.empty()) write_traces(spec, dncu_trace, dncu_trace_count);
      return report(spec, dncu_c);
    }
    if (*family) {
      json payload = json::object();
      if (family->count("--m")) payload["m"] = family_m;
      if (family_exact) payload["mode"] = "exact";
      else if (family_c.config.empty()) payload["mode"] = "scaled";
      if (family->count("--kmax")) payload["k_max"] = family_kmax;
      if (family->count("--imax")) payload["i_max"] = family_imax;
      return report(build_spec(ExperimentKind::kFamilyAudit, family_c, payload), family_c);
    }
    if (*lemmas) return report(build_spec(ExperimentKind::kLemmaSuite, lemmas_c), lemmas_c);
    if (*audit) return audit_file(audit_path, audit_steps, audit_c);
    if (*diag) return dump_diagonal(diag_steps, diag_c);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  return kConfigError;
}
