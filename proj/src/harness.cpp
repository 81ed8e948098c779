#include "bushy/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "bushy/bushy_core.hpp"
#include "bushy/fireworks.hpp"
#include "bushy/growth_family.hpp"
#include "bushy/lemmas.hpp"
#include "bushy/random.hpp"
#include "bushy/toy_computation.hpp"

namespace bushy {

using json = nlohmann::ordered_json;

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kWalkBound: return "walk-bound";
    case ExperimentKind::kFireworksTrap: return "fireworks-trap";
    case ExperimentKind::kDncBounded: return "dnc-bounded";
    case ExperimentKind::kDncUnbounded: return "dnc-unbounded";
    case ExperimentKind::kFamilyAudit: return "family-audit";
    case ExperimentKind::kLemmaSuite: return "lemma-suite";
  }
  return "?";
}

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::kWalkBound, ExperimentKind::kFireworksTrap,
                 ExperimentKind::kDncBounded, ExperimentKind::kDncUnbounded,
                 ExperimentKind::kFamilyAudit, ExperimentKind::kLemmaSuite}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::kAtLeast: return "at_least";
    case Direction::kAtMost: return "at_most";
    case Direction::kAll: return "all";
  }
  return "?";
}

std::uint64_t trial_seed(std::uint64_t base, std::uint64_t trial) {
  return derive_seed(base, trial);
}

namespace {

// Typed access to one JSON object; every key read is remembered so that
// finish() can reject the rest.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "must be an object");
  }

  std::string field(const std::string& key) const { return path_ + "." + key; }
  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }
  const json& raw(const std::string& key) {
    known_.insert(key);
    return j_.at(key);
  }

  std::uint64_t u64(const std::string& key, std::uint64_t fallback, std::uint64_t lo = 0,
                    std::uint64_t hi = std::numeric_limits<std::uint64_t>::max()) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(field(key), "must be a non-negative integer");
    }
    const auto x = v.get<std::uint64_t>();
    if (x < lo || x > hi) {
      throw ConfigError(field(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }

  std::int64_t i64(const std::string& key, std::int64_t fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(field(key), "must be an integer");
    return v.get<std::int64_t>();
  }

  double number(const std::string& key, double fallback, double lo, double hi) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(field(key), "must be a number");
    const double x = v.get<double>();
    if (!(x >= lo && x <= hi)) throw ConfigError(field(key), "out of range");
    return x;
  }

  std::string str(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(field(key), "must be a string");
    return v.get<std::string>();
  }

  Natural natural(const std::string& key, const json& v) const {
    try {
      if (v.is_number_unsigned()) return Natural(v.get<std::uint64_t>());
      if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return Natural(v.get<std::int64_t>());
      if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw 0;
        return parse_natural(s);
      }
    } catch (...) {
    }
    throw ConfigError(field(key), "must be a natural number (integer or decimal string)");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!known_.count(key)) throw ConfigError(field(key), "unknown field");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

DncBudgets read_budgets(Fields& f) {
  DncBudgets b;
  if (!f.has("budgets")) return b;
  Fields g(f.raw("budgets"), f.field("budgets"));
  b.loop_budget = g.u64("loop_budget", 0);
  b.steps_per_stage = g.u64("steps_per_stage", 64, 1, 1u << 20);
  b.search_depth = g.u64("search_depth", 1, 0, 6);
  b.width_cap = g.u64("width_cap", 64, 1, 1u << 16);
  g.finish();
  return b;
}

Functional read_functional(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, "must be a functional name");
  try {
    return Functional::named(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

ToyProgram read_program(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, "must be a toy program");
  try {
    return ToyProgram::parse(v.get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

template <class T, class F>
std::vector<T> run_trials(std::uint64_t n, std::size_t workers, F trial) {
  std::vector<T> results(n);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next++;
      if (i >= n) return;
      try {
        results[i] = trial(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
        return;
      }
    }
  };
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<std::size_t>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(n, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

// Outcome of one trial: per statistic 1 (success), 0 (failure) or -1 (not
// applicable), plus counters summed over trials.
struct TrialResult {
  std::vector<int> outcomes;
  std::map<std::string, std::uint64_t> counts;
};

struct Tally {
  std::vector<std::uint64_t> trials;
  std::vector<std::uint64_t> successes;
  std::map<std::string, std::uint64_t> counts;
};

Tally reduce(const std::vector<TrialResult>& results, std::size_t n_stats) {
  Tally t;
  t.trials.assign(n_stats, 0);
  t.successes.assign(n_stats, 0);
  for (const auto& r : results) {
    for (std::size_t k = 0; k < n_stats && k < r.outcomes.size(); ++k) {
      if (r.outcomes[k] < 0) continue;
      ++t.trials[k];
      t.successes[k] += static_cast<std::uint64_t>(r.outcomes[k]);
    }
    for (const auto& [key, v] : r.counts) t.counts[key] += v;
  }
  return t;
}

Rational pow2_neg(int e) {
  // 2^e for possibly negative e.
  return e >= 0 ? Rational(pow2(static_cast<std::uint64_t>(e)))
                : Rational(Natural(1), pow2(static_cast<std::uint64_t>(-e)));
}

// Planted maximal g-closed small set for constant g: rho^v with v < g - 1,
// where rho has no coordinate below g - 1.
Membership planted_member(std::uint64_t g) {
  return [g](const OmegaString& x) {
    if (x.empty() || g < 2) return false;
    const Natural cut(g - 1);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (x[i] < cut) return false;
    }
    return x.back() < cut;
  };
}

void run_walk(const ExperimentSpec& spec, StatsReport& report) {
  Fields f(spec.payload, "payload");
  const std::uint64_t g = f.u64("g", 2, 0, 1u << 20);
  const std::uint64_t offset = f.u64("h_offset", 4, 0, 60);
  const std::size_t depth = f.u64("depth", 3, 1, 40);
  f.finish();
  const GrowthFn gf = GrowthFn::constant(g);
  const GrowthFn h = GrowthFn::pow2_shifted(offset);
  for (std::size_t i = 0; i < depth; ++i) {
    if (gf(i) > h(i)) throw ConfigError("payload.g", "exceeds h at depth " + std::to_string(i));
  }
  const Membership member = planted_member(g);
  const PredicateSet planted([member](const OmegaString& x, Stage) { return member(x); });
  const Rational bound = avoidance_lower_bound(gf, h, depth);

  const auto results = run_trials<TrialResult>(spec.trials, spec.workers, [&](std::uint64_t i) {
    Rng rng(trial_seed(spec.seed, i));
    const WalkResult w = random_walk(h, planted, depth, {}, rng);
    return TrialResult{{w.hit_set ? 0 : 1}, {}};
  });
  const Tally t = reduce(results, 1);
  report.stats.push_back(make_statistic("avoidance", Direction::kAtLeast, t.trials[0],
                                        t.successes[0], bound, spec.confidence));
  Rational exact = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    exact *= 1 - Rational(std::max<std::uint64_t>(g, 1) - 1) / Rational(h(i));
  }
  report.details.emplace_back("planted_avoidance", to_string(exact));
  report.details.emplace_back("bound", to_string(bound));
}

void run_fireworks_trap(const ExperimentSpec& spec, StatsReport& report) {
  Fields f(spec.payload, "payload");
  const std::size_t count = f.u64("requirements", 20, 1, 60);
  const std::uint64_t offset = f.u64("cap_offset", 3, 2, 60);
  Stage budget = f.u64("budget", 0);
  const std::uint64_t replay_seeds = f.u64("replay_seeds", 100);
  const std::size_t replay_max_req = f.u64("replay_max_req", 4, 1, 12);
  const std::size_t search_depth = f.u64("search_depth", 1, 1, 4);
  const std::size_t search_width = f.u64("search_width", 2, 1, 16);
  const std::size_t step_width = f.u64("step_width", 4, 1, 1u << 16);
  f.finish();
  if (budget == 0) budget = 3 * count + 10;
  const FireworksConfig config{budget, {}, true, false};
  const TrapFamily trap = make_trap_family(count, config);
  const auto family = trap.pointers();
  const StringPoset poset({}, search_depth, search_width, step_width);
  const GrowthFn bounds = GrowthFn::pow2_shifted(offset);

  const auto results = run_trials<TrialResult>(spec.trials, spec.workers, [&](std::uint64_t i) {
    const std::uint64_t ts = trial_seed(spec.seed, i);
    Rng plan_rng(derive_seed(ts, 0));
    const FireworksPlan plan = draw_plan(bounds, count, plan_rng);
    Rng rng(derive_seed(ts, 1));
    const auto out = run_fireworks(poset, family, plan, config, rng);
    TrialResult r{{out.stuck ? 1 : 0, -1}, {}};
    if (i < replay_seeds) {
      const std::size_t req = i % std::min(count, replay_max_req);
      FireworksPlan isolated = plan;
      for (std::size_t j = 0; j < count; ++j) {
        if (j != req) isolated.caps[j] = isolated.bounds[j];
      }
      const CapScan scan = scan_caps(poset, family, isolated, config, derive_seed(ts, 1), req);
      const auto bad = std::count(scan.stuck_on_req.begin(), scan.stuck_on_req.end(), true);
      r.outcomes[1] = scan.one_bad_cap() && bad == 1 ? 1 : 0;
    }
    return r;
  });
  const Tally t = reduce(results, 2);
  report.stats.push_back(make_statistic("stuck", Direction::kAtMost, t.trials[0], t.successes[0],
                                        stuck_bound(bounds, count), spec.confidence));
  report.stats.push_back(make_statistic("one-bad-cap", Direction::kAll, t.trials[1],
                                        t.successes[1], 1, spec.confidence));
  report.details.emplace_back("budget", std::to_string(budget));
}

void add_dnc_stats(const ExperimentSpec& spec, unsigned m, const Tally& t, StatsReport& report) {
  const Rational fail = pow2_neg(1 - static_cast<int>(m));
  const Rational unmet = pow2_neg(2 - static_cast<int>(m));
  report.stats.push_back(make_statistic("dnc", Direction::kAtLeast, t.trials[0], t.successes[0],
                                        1 - fail, spec.confidence));
  report.stats.push_back(make_statistic("stuck", Direction::kAtMost, t.trials[1], t.successes[1],
                                        fail, spec.confidence));
  report.stats.push_back(make_statistic("met-given-not-stuck", Direction::kAtLeast, t.trials[2],
                                        t.successes[2], 1 - unmet, spec.confidence));
  report.stats.push_back(make_statistic("audit", Direction::kAll, t.trials[3], t.successes[3], 1,
                                        spec.confidence));
  for (const auto& [key, v] : t.counts) report.details.emplace_back(key, std::to_string(v));
}

TrialResult dnc_trial(const RunTrace& trace, const DiagonalTable& table, bool audit) {
  const RunSummary s = summarize(trace, table);
  TrialResult r;
  r.outcomes = {s.dnc ? 1 : 0, s.stuck ? 1 : 0, s.stuck ? -1 : (s.all_met ? 1 : 0), -1};
  if (audit) r.outcomes[3] = audit_trace(trace).ok() ? 1 : 0;
  for (const auto& [step, n] : s.steps) r.counts["step " + step] = n;
  r.counts["exhausted"] = s.exhausted ? 1 : 0;
  r.counts["satisfied actively"] = s.active;
  r.counts["attended"] = s.attended;
  return r;
}

void run_dnc_bounded(const ExperimentSpec& spec, StatsReport& report) {
  const BoundedConfig config = bounded_config_from_payload(spec.payload);
  const std::uint64_t diag_steps = spec.payload.value("diag_steps", 10000);
  const std::uint64_t audit_trials = spec.payload.value("audit_trials", 20);
  const DiagonalTable table(ToyEnumeration::shipped(), diag_steps);
  const auto results = run_trials<TrialResult>(spec.trials, spec.workers, [&](std::uint64_t i) {
    return dnc_trial(run_bounded_dnc(config, trial_seed(spec.seed, i)), table, i < audit_trials);
  });
  add_dnc_stats(spec, config.family.m, reduce(results, 4), report);
}

void run_dnc_unbounded(const ExperimentSpec& spec, StatsReport& report) {
  const UnboundedConfig config = unbounded_config_from_payload(spec.payload);
  const std::uint64_t diag_steps = spec.payload.value("diag_steps", 10000);
  const std::uint64_t audit_trials = spec.payload.value("audit_trials", 20);
  const DiagonalTable table(ToyEnumeration::shipped(), diag_steps);
  const auto results = run_trials<TrialResult>(spec.trials, spec.workers, [&](std::uint64_t i) {
    return dnc_trial(run_unbounded_dnc(config, trial_seed(spec.seed, i)), table, i < audit_trials);
  });
  add_dnc_stats(spec, config.m, reduce(results, 4), report);
}

FamilyOptions family_options(Fields& f, unsigned m) {
  FamilyOptions o;
  o.m = m;
  const std::string mode = f.str("mode", "scaled");
  if (mode == "exact") {
    o.mode = FamilyMode::kExact;
  } else if (mode != "scaled") {
    throw ConfigError(f.field("mode"), "must be \"exact\" or \"scaled\"");
  }
  if (f.has("threshold")) {
    const json& v = f.raw("threshold");
    if (!v.is_array()) throw ConfigError(f.field("threshold"), "must be an array");
    o.scaled_threshold.push_back(0);
    for (const auto& x : v) {
      if (!x.is_number_integer() || x.get<std::int64_t>() <= 0) {
        throw ConfigError(f.field("threshold"), "entries must be positive integers");
      }
      o.scaled_threshold.push_back(x.get<std::uint64_t>());
    }
  }
  if (f.has("boost")) {
    const json& v = f.raw("boost");
    if (!v.is_array()) throw ConfigError(f.field("boost"), "must be an array");
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw ConfigError(f.field("boost"), "entries must be integers");
      o.boost.push_back(x.get<std::int64_t>());
    }
  }
  if (f.has("h0")) {
    const json& v = f.raw("h0");
    if (!v.is_array()) throw ConfigError(f.field("h0"), "must be an array of naturals");
    std::vector<Natural> values;
    for (const auto& x : v) values.push_back(f.natural("h0", x));
    o.h0 = GrowthFn::table(values, "h0");
  }
  return o;
}

GrowthFamily make_family(const FamilyOptions& o, const std::string& where) {
  try {
    return GrowthFamily::make(o);
  } catch (const std::exception& e) {
    throw ConfigError(where, e.what());
  }
}

void run_family_audit(const ExperimentSpec& spec, StatsReport& report) {
  Fields f(spec.payload, "payload");
  const unsigned m = f.u64("m", 3, 0, 16);
  const std::size_t i_max = f.u64("i_max", 6, 0, 64);
  FamilyOptions o = family_options(f, m);
  o.k_max = f.u64("k_max", 2, 0, o.mode == FamilyMode::kExact ? 2 : 256);
  f.finish();
  const GrowthFamily family = make_family(o, "payload");
  const FamilyAudit audit = audit_family(family, i_max);
  report.stats.push_back(make_statistic("restriction-safety", Direction::kAll, 1,
                                        audit.restriction_safety, 1, spec.confidence));
  report.stats.push_back(
      make_statistic("h-dominance", Direction::kAll, 1, audit.h_dominance, 1, spec.confidence));
  report.stats.push_back(
      make_statistic("draw-floor", Direction::kAll, 1, audit.draw_floor, 1, spec.confidence));
  if (family.mode() == FamilyMode::kExact) {
    // Find the first k with threshold(k+1) < threshold(k); from there on it must keep falling.
    const std::uint64_t k_gamma = 64;
    const std::uint64_t c2 = 5;
    std::vector<Natural> t;
    for (std::size_t k = 1; k <= family.k_max() + 1; ++k) {
      t.push_back(requirement_threshold(k, family, k_gamma, c2));
    }
    std::optional<std::size_t> crossover;
    bool decreasing = true;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      if (t[k + 1] < t[k]) {
        if (!crossover) crossover = k + 1;
      } else if (crossover) {
        decreasing = false;
      }
    }
    report.stats.push_back(make_statistic("threshold-decreasing", Direction::kAll, 1,
                                          crossover && decreasing, 1, spec.confidence));
    for (std::size_t k = 0; k < t.size(); ++k) {
      report.details.emplace_back("threshold(" + std::to_string(k + 1) + ")",
                                  bit_length(abs(t[k])) > 64 ? std::string(t[k] < 0 ? "-" : "") + "~2^" + std::to_string(bit_length(abs(t[k])) - 1)
                                                          : t[k].str());
    }
  }
  auto power = [](const Natural& e) { return e <= 64 ? pow2(e.convert_to<std::uint64_t>()).str() : "2^" + e.str(); };
  for (std::size_t k = 0; k <= family.k_max(); ++k) {
    for (std::size_t i = k; i <= std::max(i_max, k); ++i) {
      report.details.emplace_back("g_" + std::to_string(k) + "(" + std::to_string(i) + ")",
                                  power(family.exponent(k, i)));
    }
  }
  for (std::size_t k = 0; k <= family.k_max(); ++k) {
    report.details.emplace_back("h(" + std::to_string(k) + ")", power(family.exponent(k, k)));
  }
  for (const auto& failure : audit.failures) report.details.emplace_back("failure", failure);
}

void run_lemmas(const ExperimentSpec& spec, StatsReport& report) {
  Fields f(spec.payload, "payload");
  LemmaSuiteConfig config;
  config.instances = spec.trials;
  config.seed = spec.seed;
  config.max_width = f.u64("max_width", 3, 1, 4);
  config.max_depth = f.u64("max_depth", 4, 1, 5);
  f.finish();
  const LemmaReport lemmas = run_lemma_suite(config);
  for (const auto& c : lemmas.checks) {
    report.stats.push_back(make_statistic(c.name, Direction::kAll, c.checked,
                                          c.checked - c.failures.size(), 1, spec.confidence));
    report.details.emplace_back(c.name + " vacuous", std::to_string(c.vacuous));
    for (const auto& failure : c.failures) report.details.emplace_back(c.name + " failure", failure);
  }
}

std::string format_double(double x) { return json(x).dump(); }

}  // namespace

ExperimentSpec parse_spec(const json& j) {
  Fields f(j, "config");
  ExperimentSpec spec;
  const std::string kind = f.str("kind", "");
  if (kind.empty()) throw ConfigError("config.kind", "missing");
  const auto k = parse_experiment_kind(kind);
  if (!k) throw ConfigError("config.kind", "unknown experiment kind \"" + kind + "\"");
  spec.kind = *k;
  spec.trials = f.u64("trials", 1000, 0, 100000000);
  spec.seed = f.u64("seed", 0);
  spec.confidence = f.number("confidence", 3.0, 0.0, 100.0);
  spec.workers = f.u64("workers", 0, 0, 1024);
  if (f.has("payload")) {
    spec.payload = f.raw("payload");
    if (!spec.payload.is_object()) throw ConfigError("config.payload", "must be an object");
  } else {
    spec.payload = default_payload(spec.kind);
  }
  f.finish();
  return spec;
}

json adversarial_roster(std::size_t traps) {
  json roster = json::array();
  for (std::size_t j = 0; j < traps; ++j) {
    roster.push_back({{"gamma", "fixed-emitter:" + std::string(j + 3, '1') + ":1"}, {"d", 0}});
  }
  roster.push_back({{"gamma", "everywhere-partial"}, {"d", 0}, {"first_attention", 1}});
  return roster;
}

json default_payload(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kWalkBound:
      return {{"g", 2}, {"h_offset", 4}, {"depth", 3}};
    case ExperimentKind::kFireworksTrap:
      return {{"requirements", 20}, {"cap_offset", 3}, {"replay_seeds", 100}};
    case ExperimentKind::kDncBounded:
      return {{"m", 3}, {"depth", 24}, {"roster", "adversarial"}, {"traps", 8}};
    case ExperimentKind::kDncUnbounded:
      return {{"m", 0},
              {"depth", 6},
              {"roster", json::array({{{"gamma", "copy-parity"}, {"phi", "PUSH 3 HALT"}}})},
              {"budgets", {{"search_depth", 3}}},
              {"n1", {{"0", 2}}},
              {"n2", {{"0:0", 2}, {"0:1", 1}}}};
    case ExperimentKind::kFamilyAudit:
      return {{"m", 3}, {"mode", "exact"}, {"k_max", 2}, {"i_max", 6}};
    case ExperimentKind::kLemmaSuite:
      return {{"max_width", 3}, {"max_depth", 4}};
  }
  return json::object();
}

BoundedConfig bounded_config_from_payload(const json& payload) {
  Fields f(payload, "payload");
  BoundedConfig c;
  const unsigned m = f.u64("m", 3, 0, 16);
  c.family = family_options(f, m);
  if (c.family.mode == FamilyMode::kExact) {
    throw ConfigError("payload.mode", "runs need a scaled family; exact towers overflow past k = 2");
  }
  c.depth = f.u64("depth", 24, 1, 4096);
  c.budgets = read_budgets(f);
  const std::string rule = f.str("rule", "delays");
  if (rule == "threshold") {
    c.rule = AttentionRule::kThreshold;
  } else if (rule != "delays") {
    throw ConfigError("payload.rule", "must be \"delays\" or \"threshold\"");
  }
  const std::size_t traps = f.u64("traps", 8, 0, 64);
  json roster = adversarial_roster(traps);
  if (f.has("roster")) {
    const json& r = f.raw("roster");
    if (r.is_string()) {
      if (r.get<std::string>() != "adversarial") {
        throw ConfigError("payload.roster", "must be \"adversarial\" or an array");
      }
    } else if (r.is_array()) {
      roster = r;
    } else {
      throw ConfigError("payload.roster", "must be \"adversarial\" or an array");
    }
  }
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const std::string where = "payload.roster[" + std::to_string(i) + "]";
    Fields e(roster[i], where);
    BoundedRequirement req;
    if (!e.has("gamma")) throw ConfigError(where + ".gamma", "missing");
    req.gamma = read_functional(e.raw("gamma"), where + ".gamma");
    req.d = e.i64("d", 0);
    if (e.has("first_attention")) req.first_attention = e.u64("first_attention", 0);
    e.finish();
    c.roster.push_back(std::move(req));
  }
  if (f.has("caps")) {
    const json& caps = f.raw("caps");
    if (!caps.is_array()) throw ConfigError("payload.caps", "must be an array");
    for (const auto& v : caps) {
      const Natural n = f.natural("caps", v);
      if (n < 1) throw ConfigError("payload.caps", "caps must be at least 1");
      c.cap_override.push_back(n);
    }
  }
  f.u64("diag_steps", 10000, 1, 100000000);
  f.u64("audit_trials", 20);
  f.finish();
  return c;
}

UnboundedConfig unbounded_config_from_payload(const json& payload) {
  Fields f(payload, "payload");
  UnboundedConfig c;
  c.m = f.u64("m", 0, 0, 16);
  c.depth = f.u64("depth", 6, 1, 4096);
  c.budgets = read_budgets(f);
  if (!f.has("roster")) throw ConfigError("payload.roster", "missing");
  const json& roster = f.raw("roster");
  if (!roster.is_array()) throw ConfigError("payload.roster", "must be an array");
  for (std::size_t i = 0; i < roster.size(); ++i) {
    const std::string where = "payload.roster[" + std::to_string(i) + "]";
    Fields e(roster[i], where);
    UnboundedRequirement req;
    if (!e.has("gamma")) throw ConfigError(where + ".gamma", "missing");
    req.gamma = read_functional(e.raw("gamma"), where + ".gamma");
    if (!e.has("phi")) throw ConfigError(where + ".phi", "missing");
    req.phi = read_program(e.raw("phi"), where + ".phi");
    req.d = e.i64("d", 0);
    req.first_attention = e.u64("first_attention", 0);
    e.finish();
    c.roster.push_back(std::move(req));
  }
  if (f.has("n1")) {
    Fields n1(f.raw("n1"), "payload.n1");
    for (const auto& [key, v] : f.raw("n1").items()) {
      std::size_t i = 0;
      try {
        i = std::stoull(key);
      } catch (...) {
        throw ConfigError("payload.n1." + key, "key must be a requirement index");
      }
      n1.has(key);
      c.n1_override[i] = n1.natural(key, v);
    }
  }
  if (f.has("n2")) {
    Fields n2(f.raw("n2"), "payload.n2");
    for (const auto& [key, v] : f.raw("n2").items()) {
      const auto colon = key.find(':');
      std::size_t i = 0;
      std::uint64_t b = 0;
      try {
        if (colon == std::string::npos) throw 0;
        i = std::stoull(key.substr(0, colon));
        b = std::stoull(key.substr(colon + 1));
      } catch (...) {
        throw ConfigError("payload.n2." + key, "key must be \"i:b\"");
      }
      n2.has(key);
      c.n2_override[{i, b}] = n2.natural(key, v);
    }
  }
  f.u64("diag_steps", 10000, 1, 100000000);
  f.u64("audit_trials", 20);
  f.finish();
  return c;
}

Statistic make_statistic(std::string name, Direction direction, std::uint64_t trials,
                         std::uint64_t successes, const Rational& bound, double confidence) {
  Statistic s;
  s.name = std::move(name);
  s.direction = direction;
  s.trials = trials;
  s.successes = successes;
  s.bound = bound;
  s.frequency = trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
  const double b = std::clamp(to_double(bound), 0.0, 1.0);
  s.sigma = trials == 0 ? 0.0 : std::sqrt(b * (1 - b) / static_cast<double>(trials));
  s.margin = confidence * s.sigma;
  switch (direction) {
    case Direction::kAtLeast:
      s.pass = trials == 0 || s.frequency >= to_double(bound) - s.margin;
      break;
    case Direction::kAtMost:
      s.pass = trials == 0 || s.frequency <= to_double(bound) + s.margin;
      break;
    case Direction::kAll:
      s.pass = successes == trials;
      break;
  }
  return s;
}

StatsReport run_experiment(const ExperimentSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  StatsReport report;
  report.kind = spec.kind;
  report.seed = spec.seed;
  report.trials = spec.trials;
  report.confidence = spec.confidence;
  switch (spec.kind) {
    case ExperimentKind::kWalkBound: run_walk(spec, report); break;
    case ExperimentKind::kFireworksTrap: run_fireworks_trap(spec, report); break;
    case ExperimentKind::kDncBounded: run_dnc_bounded(spec, report); break;
    case ExperimentKind::kDncUnbounded: run_dnc_unbounded(spec, report); break;
    case ExperimentKind::kFamilyAudit: run_family_audit(spec, report); break;
    case ExperimentKind::kLemmaSuite: run_lemmas(spec, report); break;
  }
  report.pass = std::all_of(report.stats.begin(), report.stats.end(),
                            [](const Statistic& s) { return s.pass; });
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string report_json(const StatsReport& r, bool with_wall_clock) {
  json j;
  j["kind"] = to_string(r.kind);
  j["seed"] = r.seed;
  j["trials"] = r.trials;
  j["confidence"] = r.confidence;
  j["pass"] = r.pass;
  json stats = json::array();
  for (const auto& s : r.stats) {
    stats.push_back({{"name", s.name},
                     {"direction", to_string(s.direction)},
                     {"trials", s.trials},
                     {"successes", s.successes},
                     {"frequency", s.frequency},
                     {"bound", to_string(s.bound)},
                     {"bound_decimal", to_double(s.bound)},
                     {"sigma", s.sigma},
                     {"margin", s.margin},
                     {"verdict", s.pass ? "pass" : "fail"}});
  }
  j["statistics"] = std::move(stats);
  json details = json::array();
  for (const auto& [k, v] : r.details) details.push_back({{"key", k}, {"value", v}});
  j["details"] = std::move(details);
  if (with_wall_clock) j["wall_clock_seconds"] = r.wall_clock_seconds;
  return j.dump(2) + "\n";
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string report_csv(const StatsReport& r, bool with_wall_clock) {
  std::ostringstream out;
  out << "kind,seed,statistic,direction,trials,successes,frequency,bound,bound_decimal,sigma,"
         "margin,verdict\n";
  for (const auto& s : r.stats) {
    out << to_string(r.kind) << ',' << r.seed << ',' << csv_field(s.name) << ','
        << to_string(s.direction) << ',' << s.trials << ',' << s.successes << ','
        << format_double(s.frequency) << ',' << to_string(s.bound) << ','
        << format_double(to_double(s.bound)) << ',' << format_double(s.sigma) << ','
        << format_double(s.margin) << ',' << (s.pass ? "pass" : "fail") << '\n';
  }
  out << "\nkey,value\n";
  out << "pass," << (r.pass ? "true" : "false") << '\n';
  out << "trials," << r.trials << '\n';
  out << "confidence," << format_double(r.confidence) << '\n';
  for (const auto& [k, v] : r.details) out << csv_field(k) << ',' << csv_field(v) << '\n';
  if (with_wall_clock) out << "wall_clock_seconds," << format_double(r.wall_clock_seconds) << '\n';
  return out.str();
}

}  // namespace bushy
