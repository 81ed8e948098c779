#pragma once

#include <concepts>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bushy/enumerable_set.hpp"
#include "bushy/growth_fn.hpp"
#include "bushy/random.hpp"

namespace bushy {

/// A computable partial order with a decidable extension search. `leq(q, p)`
/// means q extends p. `find_below(p, w, s)` returns some q <= p in w at stage s
/// (the same predicate refutes passive guesses and answers active searches).
/// `random_step` may extend a condition between requirement actions.
template <class P>
concept ForcingPoset = requires(const P& poset, const typename P::Condition& a,
                                const typename P::Condition& b, const typename P::Set& w,
                                Stage s, Rng& rng) {
  { poset.root() } -> std::convertible_to<typename P::Condition>;
  { poset.leq(a, b) } -> std::convertible_to<bool>;
  { poset.find_below(a, w, s) } -> std::convertible_to<std::optional<typename P::Condition>>;
  { poset.random_step(a, rng) } -> std::convertible_to<std::optional<typename P::Condition>>;
  { poset.describe(a) } -> std::convertible_to<std::string>;
};

/// Strings ordered by extension. Searches look at most `search_depth` values
/// past p with values below `search_width`; random steps append a value
/// uniform in [0, step_width) when step_width > 0.
class StringPoset {
 public:
  using Condition = OmegaString;
  using Set = EnumerableSet;

  StringPoset(OmegaString root = {}, std::size_t search_depth = 2, std::size_t search_width = 2,
              std::uint64_t step_width = 0)
      : root_(std::move(root)),
        search_depth_(search_depth),
        search_width_(search_width),
        step_width_(step_width) {}

  OmegaString root() const { return root_; }
  bool leq(const OmegaString& q, const OmegaString& p) const { return p.is_prefix_of(q); }
  std::optional<OmegaString> find_below(const OmegaString& p, const EnumerableSet& w,
                                        Stage s) const;
  std::optional<OmegaString> random_step(const OmegaString& p, Rng& rng) const;
  std::string describe(const OmegaString& p) const { return p.to_string(); }

 private:
  OmegaString root_;
  std::size_t search_depth_;
  std::size_t search_width_;
  std::uint64_t step_width_;
};

/// Caps n_i uniform on [1, N(i)] and the bounds they were drawn from.
struct FireworksPlan {
  std::vector<Natural> bounds;
  std::vector<Natural> caps;
  std::size_t size() const { return caps.size(); }
};

FireworksPlan draw_plan(const GrowthFn& bound, std::size_t req_count, Rng& rng);

/// sum_{i < req_count} 1/N(i), exactly.
Rational stuck_bound(const GrowthFn& bound, std::size_t req_count);

enum class ReqStatus { kPending, kSatisfiedPassively, kSatisfiedActively };
std::string to_string(ReqStatus status);

struct FireworksEvent {
  enum class Kind { kGuess, kRefutation, kSwitch, kExtension, kRandomStep, kStuck, kFinal };
  Kind kind;
  Stage stage = 0;
  std::size_t req = 0;
  std::string detail;
};
std::string to_string(FireworksEvent::Kind kind);

struct FireworksConfig {
  Stage budget = 100;
  /// Requirement i is first attended at a stage >= first_attention[i]
  /// (defaults to i when the vector is short).
  std::vector<Stage> first_attention;
  bool random_steps = false;
  bool log_events = true;

  Stage delay(std::size_t i) const {
    return i < first_attention.size() ? first_attention[i] : static_cast<Stage>(i);
  }
};

struct StuckInfo {
  std::size_t req = 0;
  Stage since = 0;
};

template <class Condition>
struct FireworksOutcome {
  std::vector<ReqStatus> status;
  std::vector<std::uint64_t> counters;
  /// Chain index at which each requirement was settled (passive: index of the
  /// standing guess; active: index of the extension).
  std::vector<std::optional<std::size_t>> settled_at;
  std::vector<Stage> settled_stage;
  std::optional<StuckInfo> stuck;
  std::vector<Condition> chain;
  std::vector<FireworksEvent> events;
  Stage final_stage = 0;
};

/// The template: passive guesses "no q <= p in W_i" are held until the stage-s
/// enumeration refutes them; after n_i - 1 refutations the next guess is active
/// and blocks everything until some q <= p in W_i appears. A run whose active
/// search is still waiting at the last stage is stuck.
template <ForcingPoset P>
FireworksOutcome<typename P::Condition> run_fireworks(
    const P& poset, const std::vector<const typename P::Set*>& family, const FireworksPlan& plan,
    const FireworksConfig& config, Rng& rng) {
  using C = typename P::Condition;
  enum class Mode { kIdle, kPassive, kActive, kDone };
  const std::size_t n = family.size();
  if (plan.size() < n) throw std::invalid_argument("run_fireworks: plan has fewer caps than sets");

  FireworksOutcome<C> out;
  out.status.assign(n, ReqStatus::kPending);
  out.counters.assign(n, 0);
  out.settled_at.assign(n, std::nullopt);
  out.settled_stage.assign(n, 0);
  out.chain.push_back(poset.root());

  std::vector<Mode> mode(n, Mode::kIdle);
  std::vector<std::size_t> guess_index(n, 0);
  std::optional<std::size_t> waiting;

  auto log = [&](FireworksEvent::Kind kind, Stage s, std::size_t req, std::string detail) {
    if (config.log_events) out.events.push_back({kind, s, req, std::move(detail)});
  };
  auto extend = [&](std::size_t req, const C& q, Stage s) {
    if (!(q == out.chain.back())) out.chain.push_back(q);
    mode[req] = Mode::kDone;
    out.status[req] = ReqStatus::kSatisfiedActively;
    out.settled_at[req] = out.chain.size() - 1;
    out.settled_stage[req] = s;
    log(FireworksEvent::Kind::kExtension, s, req, poset.describe(q));
  };
  // Makes the next guess for `req`; returns false if the run is now blocked.
  auto guess = [&](std::size_t req, Stage s) {
    const C& p = out.chain.back();
    if (Natural(out.counters[req] + 1) < plan.caps[req]) {
      mode[req] = Mode::kPassive;
      guess_index[req] = out.chain.size() - 1;
      log(FireworksEvent::Kind::kGuess, s, req, poset.describe(p));
      return true;
    }
    mode[req] = Mode::kActive;
    guess_index[req] = out.chain.size() - 1;
    log(FireworksEvent::Kind::kSwitch, s, req, poset.describe(p));
    if (auto q = poset.find_below(p, *family[req], s)) {
      extend(req, *q, s);
      return true;
    }
    waiting = req;
    return false;
  };

  Stage s = 0;
  for (; s < config.budget; ++s) {
    if (waiting) {
      const std::size_t req = *waiting;
      if (auto q = poset.find_below(out.chain[guess_index[req]], *family[req], s)) {
        waiting.reset();
        extend(req, *q, s);
      }
      continue;
    }
    bool blocked = false;
    for (std::size_t i = 0; i < n && !blocked; ++i) {
      if (mode[i] != Mode::kPassive) continue;
      if (poset.find_below(out.chain[guess_index[i]], *family[i], s)) {
        ++out.counters[i];
        log(FireworksEvent::Kind::kRefutation, s, i, std::to_string(out.counters[i]));
        blocked = !guess(i, s);
      }
    }
    for (std::size_t i = 0; i < n && !blocked; ++i) {
      if (mode[i] == Mode::kIdle && config.delay(i) <= s) blocked = !guess(i, s);
    }
    if (!blocked && config.random_steps) {
      if (auto next = poset.random_step(out.chain.back(), rng)) {
        out.chain.push_back(*next);
        log(FireworksEvent::Kind::kRandomStep, s, 0, poset.describe(*next));
      }
    }
  }
  out.final_stage = config.budget == 0 ? 0 : config.budget - 1;
  if (waiting) {
    out.stuck = StuckInfo{*waiting, out.final_stage};
    log(FireworksEvent::Kind::kStuck, out.final_stage, *waiting, "");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (mode[i] != Mode::kPassive) continue;
    const bool refuted =
        poset.find_below(out.chain[guess_index[i]], *family[i], out.final_stage).has_value();
    if (!refuted) {
      out.status[i] = ReqStatus::kSatisfiedPassively;
      out.settled_at[i] = guess_index[i];
      out.settled_stage[i] = out.final_stage;
    }
    log(FireworksEvent::Kind::kFinal, out.final_stage, i, refuted ? "refuted" : "standing");
  }
  return out;
}

/// Frontier sets W_i(s) = { tau : |tau| <= min(s, F_i) }; a negative frontier
/// gives the empty set. Against a poset whose chain grows by one random step
/// per stage, a guess made at stage t is refuted iff t <= F_i, so requirement i
/// sees exactly F_i - delay_i + 1 refutations before its guesses start to stand.
class FrontierSet final : public EnumerableSet {
 public:
  explicit FrontierSet(std::int64_t frontier) : frontier_(frontier) {}
  bool contains(const OmegaString& x, Stage stage) const override {
    if (frontier_ < 0) return false;
    return x.size() <= std::min<Stage>(stage, static_cast<Stage>(frontier_));
  }
  std::int64_t frontier() const { return frontier_; }

 private:
  std::int64_t frontier_;
};

/// Trap family: requirement i is refuted exactly refutations[i] times, so the
/// single cap value refutations[i] + 1 leaves it waiting forever.
struct TrapFamily {
  std::vector<FrontierSet> sets;
  std::vector<std::uint64_t> refutations;
  std::vector<const EnumerableSet*> pointers() const;
};

/// Default trap: refutations[i] = i + 1, which lies below N(i) whenever N(i) > i + 2.
TrapFamily make_trap_family(std::size_t req_count, const FireworksConfig& config,
                            const std::vector<std::uint64_t>& refutations = {});

std::string events_to_jsonl(const std::vector<FireworksEvent>& events);

/// Replays one seed with every cap value n_i in [1, N(i)] (other caps fixed).
struct CapScan {
  std::size_t req = 0;
  std::vector<ReqStatus> status;        // index v-1 for cap v
  std::vector<bool> stuck_on_req;       // index v-1 for cap v
  /// At most one stuck value; below it the requirement is satisfied actively,
  /// above it passively.
  bool one_bad_cap() const;
};

CapScan scan_caps(const StringPoset& poset, const std::vector<const EnumerableSet*>& family,
                  const FireworksPlan& plan, const FireworksConfig& config, std::uint64_t seed,
                  std::size_t req);

}  // namespace bushy
