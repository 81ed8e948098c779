#include "bushy/fireworks.hpp"

#include <nlohmann/json.hpp>

namespace bushy {

namespace {

std::optional<OmegaString> search(const OmegaString& p, const EnumerableSet& w, Stage s,
                                  std::size_t depth_left, std::size_t width) {
  if (w.contains(p, s)) return p;
  if (depth_left == 0) return std::nullopt;
  for (std::size_t v = 0; v < width; ++v) {
    if (auto q = search(p.child(Natural(v)), w, s, depth_left - 1, width)) return q;
  }
  return std::nullopt;
}

}  // namespace

std::optional<OmegaString> StringPoset::find_below(const OmegaString& p, const EnumerableSet& w,
                                                   Stage s) const {
  return search(p, w, s, search_depth_, search_width_);
}

std::optional<OmegaString> StringPoset::random_step(const OmegaString& p, Rng& rng) const {
  if (step_width_ == 0) return std::nullopt;
  return p.child(Natural(rng.below(step_width_)));
}

FireworksPlan draw_plan(const GrowthFn& bound, std::size_t req_count, Rng& rng) {
  FireworksPlan plan;
  for (std::size_t i = 0; i < req_count; ++i) {
    const Natural n = bound(i);
    if (n < 1) throw std::invalid_argument("draw_plan: N(" + std::to_string(i) + ") < 1");
    plan.bounds.push_back(n);
    plan.caps.push_back(rng.one_to(n));
  }
  return plan;
}

Rational stuck_bound(const GrowthFn& bound, std::size_t req_count) {
  Rational total = 0;
  for (std::size_t i = 0; i < req_count; ++i) total += Rational(1, bound(i));
  return total;
}

std::string to_string(ReqStatus status) {
  switch (status) {
    case ReqStatus::kPending: return "pending";
    case ReqStatus::kSatisfiedPassively: return "satisfied-passively";
    case ReqStatus::kSatisfiedActively: return "satisfied-actively";
  }
  return "?";
}

std::string to_string(FireworksEvent::Kind kind) {
  using K = FireworksEvent::Kind;
  switch (kind) {
    case K::kGuess: return "guess";
    case K::kRefutation: return "refutation";
    case K::kSwitch: return "switch";
    case K::kExtension: return "extension";
    case K::kRandomStep: return "random-step";
    case K::kStuck: return "stuck";
    case K::kFinal: return "final";
  }
  return "?";
}

std::vector<const EnumerableSet*> TrapFamily::pointers() const {
  std::vector<const EnumerableSet*> out;
  for (const auto& s : sets) out.push_back(&s);
  return out;
}

TrapFamily make_trap_family(std::size_t req_count, const FireworksConfig& config,
                            const std::vector<std::uint64_t>& refutations) {
  TrapFamily trap;
  for (std::size_t i = 0; i < req_count; ++i) {
    const std::uint64_t t = i < refutations.size() ? refutations[i] : i + 1;
    trap.refutations.push_back(t);
    trap.sets.emplace_back(static_cast<std::int64_t>(config.delay(i) + t) - 1);
  }
  return trap;
}

std::string events_to_jsonl(const std::vector<FireworksEvent>& events) {
  std::string out;
  for (const auto& e : events) {
    nlohmann::ordered_json j;
    j["stage"] = e.stage;
    j["event"] = to_string(e.kind);
    j["req"] = e.req;
    if (!e.detail.empty()) j["detail"] = e.detail;
    out += j.dump() + "\n";
  }
  return out;
}

bool CapScan::one_bad_cap() const {
  std::optional<std::size_t> bad;
  for (std::size_t v = 0; v < stuck_on_req.size(); ++v) {
    if (!stuck_on_req[v]) continue;
    if (bad) return false;
    bad = v;
  }
  if (!bad) return true;
  for (std::size_t v = 0; v < status.size(); ++v) {
    if (v < *bad && status[v] != ReqStatus::kSatisfiedActively) return false;
    if (v > *bad && status[v] != ReqStatus::kSatisfiedPassively) return false;
  }
  return true;
}

CapScan scan_caps(const StringPoset& poset, const std::vector<const EnumerableSet*>& family,
                  const FireworksPlan& plan, const FireworksConfig& config, std::uint64_t seed,
                  std::size_t req) {
  CapScan scan;
  scan.req = req;
  FireworksConfig quiet = config;
  quiet.log_events = false;
  const auto top = static_cast<std::uint64_t>(plan.bounds.at(req));
  for (std::uint64_t v = 1; v <= top; ++v) {
    FireworksPlan modified = plan;
    modified.caps[req] = v;
    Rng rng(seed);
    const auto out = run_fireworks(poset, family, modified, quiet, rng);
    scan.status.push_back(out.status[req]);
    scan.stuck_on_req.push_back(out.stuck && out.stuck->req == req);
  }
  return scan;
}

}  // namespace bushy
