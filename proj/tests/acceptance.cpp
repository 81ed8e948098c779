// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failing criteria.

#include <boost/multiprecision/cpp_int.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bushy/dnc_builder.hpp"
#include "bushy/growth_family.hpp"
#include "bushy/harness.hpp"
#include "bushy/toy_computation.hpp"

namespace {

using namespace bushy;
using json = nlohmann::ordered_json;
using Big = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

constexpr double kConfidence = 3.0;
constexpr double kLemmaSeconds = 10;
constexpr double kWalkSeconds = 30;
constexpr double kFireworksSeconds = 60;
constexpr double kDncSeconds = 300;
constexpr double kFamilySeconds = 5;
constexpr double kUnboundedSeconds = 10;

struct Outcome {
  bool pass = true;
  std::string note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note += (note.empty() ? "" : "; ") + what;
    }
  }
};

const Statistic* find_stat(const StatsReport& r, const std::string& name) {
  for (const auto& s : r.stats) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string describe(const Statistic& s) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s %llu/%llu=%.4f vs %s", s.name.c_str(),
                static_cast<unsigned long long>(s.successes),
                static_cast<unsigned long long>(s.trials), s.frequency,
                to_string(s.bound).c_str());
  return buf;
}

void check_stat(Outcome& o, const StatsReport& r, const std::string& name,
                const BigRational& expected_bound, std::string& summary) {
  const Statistic* s = find_stat(r, name);
  if (!s) {
    o.require(false, "missing statistic " + name);
    return;
  }
  o.require(s->bound == expected_bound, name + " bound is " + to_string(s->bound));
  o.require(s->trials > 0, name + " has no trials");
  o.require(s->pass, describe(*s) + " violates the bound");
  summary += (summary.empty() ? "" : ", ") + describe(*s);
}

template <class F>
double timed(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

StatsReport run(const json& spec) { return run_experiment(parse_spec(spec)); }

json criterion1_spec() {
  return {{"kind", "lemma-suite"},
          {"trials", 1000},
          {"seed", 1},
          {"payload", {{"max_width", 3}, {"max_depth", 4}}}};
}

json criterion2_spec() {
  return {{"kind", "walk-bound"},
          {"trials", 100000},
          {"seed", 2},
          {"confidence", kConfidence},
          {"payload", {{"g", 2}, {"h_offset", 4}, {"depth", 3}}}};
}

Outcome criterion1() {
  Outcome o;
  StatsReport r;
  const double t = timed([&] { r = run(criterion1_spec()); });
  std::string summary;
  for (const char* name : {"agreement", "concatenation", "additivity", "closure"}) {
    const Statistic* s = find_stat(r, name);
    o.require(s != nullptr, std::string("missing check ") + name);
    if (!s) continue;
    o.require(s->trials >= 100, std::string(name) + " checked too few instances");
    o.require(s->successes == s->trials, std::string(name) + " has failures");
    summary += std::string(summary.empty() ? "" : ", ") + name + " " + std::to_string(s->trials);
  }
  o.require(t < kLemmaSeconds, "took " + std::to_string(t) + " s");
  if (o.pass) o.note = summary + " (" + std::to_string(t) + " s)";
  return o;
}

Outcome criterion2() {
  Outcome o;
  BigRational bound = 1;
  for (int i = 0; i < 3; ++i) bound *= 1 - BigRational(2, Big(1) << (i + 4));
  o.require(bound == BigRational(3255, 4096), "oracle bound is not 3255/4096");
  StatsReport r;
  const double t = timed([&] { r = run(criterion2_spec()); });
  std::string summary;
  check_stat(o, r, "avoidance", bound, summary);
  o.require(t < kWalkSeconds, "took " + std::to_string(t) + " s");
  if (o.pass) o.note = summary + " (" + std::to_string(t) + " s)";
  return o;
}

Outcome criterion3() {
  Outcome o;
  BigRational bound = 0;
  for (int i = 0; i < 20; ++i) bound += BigRational(1, Big(1) << (i + 3));
  o.require(bound < BigRational(1, 4), "oracle partial sum is not below 1/4");
  StatsReport r;
  const double t = timed([&] {
    r = run({{"kind", "fireworks-trap"},
             {"trials", 10000},
             {"seed", 3},
             {"confidence", kConfidence},
             {"payload", {{"requirements", 20}, {"cap_offset", 3}, {"replay_seeds", 100}}}});
  });
  std::string summary;
  check_stat(o, r, "stuck", bound, summary);
  check_stat(o, r, "one-bad-cap", 1, summary);
  const Statistic* replay = find_stat(r, "one-bad-cap");
  o.require(replay && replay->trials == 100, "one-bad-cap did not replay 100 seeds");
  o.require(t < kFireworksSeconds, "took " + std::to_string(t) + " s");
  if (o.pass) o.note = summary + " (" + std::to_string(t) + " s)";
  return o;
}

Outcome criterion4() {
  Outcome o;
  StatsReport r;
  const double t = timed([&] {
    r = run({{"kind", "dnc-bounded"},
             {"trials", 10000},
             {"seed", 4},
             {"confidence", kConfidence},
             {"payload", {{"m", 3}, {"depth", 24}, {"roster", "adversarial"}, {"traps", 8}}}});
  });
  std::string summary;
  check_stat(o, r, "dnc", 1 - BigRational(1, 4), summary);
  check_stat(o, r, "stuck", BigRational(1, 4), summary);
  check_stat(o, r, "met-given-not-stuck", 1 - BigRational(1, 2), summary);
  check_stat(o, r, "audit", 1, summary);
  const Statistic* stuck = find_stat(r, "stuck");
  o.require(stuck && stuck->successes > 0, "the adversarial roster never got a run stuck");
  o.require(t < kDncSeconds, "took " + std::to_string(t) + " s");
  if (o.pass) o.note = summary + " (" + std::to_string(t) + " s)";
  return o;
}

// g_0(i) = 2^(i+m); g_k(i) = 1 for i < k, otherwise g_(k-1)(i) * 2^(h(k-1)) * 2^(i+m);
// h(k) = g_k(k). Evaluated by literal multiplication.
std::vector<std::vector<Big>> recurrence(unsigned m, std::size_t k_max, std::size_t i_max) {
  std::vector<std::vector<Big>> g(k_max + 1, std::vector<Big>(i_max + 1));
  for (std::size_t i = 0; i <= i_max; ++i) g[0][i] = Big(1) << (i + m);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const Big& h_prev = g[k - 1][k - 1];
    const Big step = Big(1) << static_cast<unsigned>(h_prev);
    for (std::size_t i = 0; i <= i_max; ++i) {
      g[k][i] = i < k ? Big(1) : g[k - 1][i] * step * (Big(1) << (i + m));
    }
  }
  return g;
}

Outcome criterion5() {
  Outcome o;
  std::size_t compared = 0;
  const double t = timed([&] {
    for (unsigned m = 0; m <= 4; ++m) {
      const std::size_t i_max = 4;
      const StatsReport r = run({{"kind", "family-audit"},
                                 {"payload", {{"m", m}, {"mode", "exact"}, {"k_max", 2}, {"i_max", i_max}}}});
      for (const char* name : {"restriction-safety", "h-dominance", "draw-floor", "threshold-decreasing"}) {
        const Statistic* s = find_stat(r, name);
        o.require(s && s->pass, "m=" + std::to_string(m) + " " + name + " fails");
      }
      FamilyOptions opts;
      opts.m = m;
      opts.mode = FamilyMode::kExact;
      opts.k_max = 2;
      const GrowthFamily family = GrowthFamily::make(opts);
      const auto oracle = recurrence(m, 2, i_max);
      for (std::size_t k = 0; k <= 2; ++k) {
        for (std::size_t i = 0; i <= i_max; ++i) {
          ++compared;
          if (family.g(k, i) != oracle[k][i]) {
            o.require(false, "m=" + std::to_string(m) + " g_" + std::to_string(k) + "(" +
                                 std::to_string(i) + ") differs from the recurrence");
          }
        }
      }
      if (m == 3) o.require(family.g(1, 1) == 65536, "g_1(1) at m=3 is not 65536");
    }
  });
  o.require(t < kFamilySeconds, "took " + std::to_string(t) + " s");
  if (o.pass) {
    o.note = std::to_string(compared) + " values match the recurrence for m<=4, k<=2 (" +
             std::to_string(t) + " s)";
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const double t = timed([&] {
    const UnboundedConfig config =
        unbounded_config_from_payload(default_payload(ExperimentKind::kDncUnbounded));
    const RunTrace trace = run_unbounded_dnc(config, 6);
    std::map<std::string, std::size_t> steps;
    for (const auto& e : trace.events) ++steps[e.step];
    for (const char* step : {"a", "b.2.i", "b.2.ii", "b.3.i", "b.3.ii"}) {
      o.require(steps[step] > 0, std::string("step ") + step + " never ran");
    }
    const DiagonalTable table(ToyEnumeration::shipped(), 10000);
    const TraceAudit audit = audit_trace(trace, &table);
    o.require(audit.ok(), audit.violations.empty() ? "audit failed" : audit.violations.front());
    o.require(audit.witnesses_checked > 0, "no witness was checked");
    o.require(audit.lists_checked > 0, "no assumption list was checked");
    o.require(audit.refutations_checked > 0, "no refutation was checked");
    const RunTrace again = run_unbounded_dnc(config, 6);
    o.require(trace_to_json(trace) == trace_to_json(again), "rerun differs");
    o.require(trace_to_json(trace_from_json(trace_to_json(trace))) == trace_to_json(trace),
              "trace does not survive a JSON round trip");
    if (o.pass) {
      o.note = std::to_string(trace.events.size()) + " events, " +
               std::to_string(audit.witnesses_checked) + " witnesses, " +
               std::to_string(audit.lists_checked) + " lists, " +
               std::to_string(audit.refutations_checked) + " refutations";
    }
  });
  o.require(t < kUnboundedSeconds, "took " + std::to_string(t) + " s");
  return o;
}

Outcome criterion7() {
  Outcome o;
  for (const json& base : {criterion1_spec(), criterion2_spec()}) {
    json a = base, b = base;
    a["workers"] = 1;
    b["workers"] = 3;
    const std::string first = report_json(run(a), false);
    const std::string second = report_json(run(b), false);
    const std::string kind = base["kind"];
    o.require(first == second, kind + " JSON differs between reruns");
    o.require(report_csv(run(a), false) == report_csv(run(a), false), kind + " CSV differs");
  }
  if (o.pass) o.note = "lemma-suite and walk-bound reports byte-identical across reruns";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 lemma suite", criterion1},        {"2 walk bound", criterion2},
      {"3 fireworks stuck bound", criterion3}, {"4 bounded DNC claims", criterion4},
      {"5 exact family audits", criterion5}, {"6 unbounded three-branch run", criterion6},
      {"7 determinism", criterion7},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.note = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failures;
    std::printf("%s criterion %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.note.c_str());
    std::fflush(stdout);
  }
  return failures;
}
