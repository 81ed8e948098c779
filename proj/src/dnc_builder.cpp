#include "bushy/dnc_builder.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "bushy/prefix_free.hpp"
#include "bushy/random.hpp"

namespace bushy {

using json = nlohmann::ordered_json;

Natural pair(const Natural& x, const Natural& y) {
  const Natural s = x + y;
  return s * (s + 1) / 2 + y;
}

Natural triple(std::uint64_t i, std::uint64_t a, std::uint64_t b) {
  return pair(pair(Natural(i), Natural(a)), Natural(b));
}

const char* to_string(RequirementStatus status) {
  switch (status) {
    case RequirementStatus::kUnattended: return "unattended";
    case RequirementStatus::kAssuming: return "assuming";
    case RequirementStatus::kWaitingPhi: return "waiting-phi";
    case RequirementStatus::kWaiting: return "waiting";
    case RequirementStatus::kSatisfiedActively: return "satisfied-actively";
  }
  return "?";
}

const char* to_string(AssumptionKind kind) {
  switch (kind) {
    case AssumptionKind::kSmall: return "small";
    case AssumptionKind::kPhiUndefined: return "phi-undefined";
    case AssumptionKind::kPhiSmall: return "phi-small";
  }
  return "?";
}

bool RunTrace::all_attended_met() const {
  for (const auto& st : requirements) {
    if (st.status != RequirementStatus::kUnattended && !st.met) return false;
  }
  return true;
}

namespace {

std::uint64_t to_u64(const Natural& n, const char* what) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) {
    throw std::domain_error(std::string(what) + " does not fit in 64 bits");
  }
  return static_cast<std::uint64_t>(n);
}

Natural pow2_nat(const Natural& e) { return GrowthFamily::pow2_big(e); }

class OutputCache {
 public:
  OutputCache(const Functional& gamma, std::uint64_t steps) : gamma_(gamma), steps_(steps) {}
  const BitString& operator()(const OmegaString& tau) {
    auto it = memo_.find(tau);
    if (it == memo_.end()) it = memo_.emplace(tau, gamma_output(gamma_, tau, steps_)).first;
    return it->second;
  }

 private:
  const Functional& gamma_;
  std::uint64_t steps_;
  std::map<OmegaString, BitString> memo_;
};

using CachePtr = std::shared_ptr<OutputCache>;

// Everything needed to re-evaluate sets, bounds and refutations of a run.
struct Context {
  bool bounded = true;
  unsigned m = 0;
  std::size_t search_depth = 1;
  std::size_t width_cap = 64;
  std::uint64_t steps_per_stage = 64;
  std::optional<GrowthFamily> family;
  std::vector<Natural> hs;
  std::vector<Functional> gammas;
  std::vector<ToyProgram> phis;
  std::vector<std::int64_t> ds;

  std::uint64_t steps(Stage s) const { return s * steps_per_stage; }
  Caps caps_above(const OmegaString& s) const { return {s.size() + search_depth, width_cap}; }

  bool in_tree(const OmegaString& tau) const {
    if (!bounded) return true;
    for (std::size_t i = 0; i < tau.size(); ++i) {
      if (i >= hs.size()) throw std::out_of_range("string longer than the family's k_max");
      if (tau[i] >= hs[i]) return false;
    }
    return true;
  }

  CachePtr cache(std::size_t req, Stage s) const {
    return std::make_shared<OutputCache>(gammas.at(req), steps(s));
  }

  Membership member(const Natural& threshold, const BitString& rho, CachePtr c) const {
    return [this, threshold, rho, c](const OmegaString& tau) {
      if (!in_tree(tau)) return false;
      const BitString& out = (*c)(tau);
      return Natural(out.size()) >= threshold && is_bit_prefix(rho, out);
    };
  }

  std::optional<std::uint64_t> phi_value(std::size_t req, const Natural& r, Stage s) const {
    Natural arg = r + ds.at(req);
    if (arg < 0) arg = 0;
    MachineInput input;
    input.argument = arg > std::numeric_limits<std::uint64_t>::max()
                         ? std::numeric_limits<std::uint64_t>::max()
                         : static_cast<std::uint64_t>(arg);
    return execute(phis.at(req), input, steps(s)).value;
  }

  GrowthFn assumption_fn(const std::vector<Assumption>& all, const Assumption& a) const {
    if (a.kind == AssumptionKind::kSmall) return family->g_fn(a.sigma.size());
    return GrowthFn::times_pow2(unbounded_bound(all, a.list, m),
                                to_u64(a.threshold, "phi(r + d)"));
  }

  bool refuted(const std::vector<Assumption>& all, const Assumption& a, Stage s) const {
    if (a.kind == AssumptionKind::kPhiUndefined) return phi_value(a.req, a.r, s).has_value();
    return is_big_bounded(member(a.threshold, "", cache(a.req, s)), a.sigma,
                          assumption_fn(all, a), caps_above(a.sigma))
        .has_value();
  }

  bool hits(const Assumption& a, const OmegaString& path, Stage s) const {
    if (a.kind == AssumptionKind::kPhiUndefined || !a.sigma.is_prefix_of(path)) return false;
    const Membership in = member(a.threshold, "", cache(a.req, s));
    for (std::size_t n = a.sigma.size(); n <= path.size(); ++n) {
      if (in(path.prefix(n))) return true;
    }
    return false;
  }

  GrowthFn search_fn(const std::vector<Assumption>& all, const Activation& act) const {
    return bounded ? family->restriction_fn(act.sigma.size())
                   : unbounded_bound(all, act.list, m);
  }

  // Met at the final stage: satisfied actively, or a standing assumption that
  // still holds and whose set the path avoided.
  bool met(const std::vector<Assumption>& all, const RequirementState& st,
           const OmegaString& path, Stage s) const {
    if (st.status == RequirementStatus::kSatisfiedActively) return true;
    if (st.status != RequirementStatus::kAssuming || !st.standing) return false;
    const Assumption& a = all.at(*st.standing);
    return !refuted(all, a, s) && !hits(a, path, s);
  }
};

Stage default_budget(Stage budget, std::size_t depth) {
  return budget != 0 ? budget : 64 * static_cast<Stage>(depth) + 256;
}

class RunnerBase {
 protected:
  RunnerBase(std::uint64_t seed) : rng_(derive_seed(seed, 0)), cap_seed_(derive_seed(seed, 1)) {
    trace_.seed = seed;
  }

  void event(Stage s, std::optional<std::size_t> req, std::string step, std::string outcome,
             std::optional<std::size_t> assumption = std::nullopt) {
    trace_.events.push_back(
        TraceEvent{s, req, std::move(step), std::move(outcome), assumption, trace_.prefix.size()});
  }

  void draw(const Natural& bound, std::vector<std::size_t> list = {}) {
    Draw d;
    d.depth = trace_.prefix.size();
    d.bound = bound;
    d.value = rng_.below(bound);
    d.list = std::move(list);
    trace_.prefix.push_back(d.value);
    trace_.draws.push_back(std::move(d));
  }

  void walk(std::size_t activation) {
    const WitnessTree tree = trace_.activations[activation].tree;
    OmegaString node = trace_.prefix;
    while (!tree.is_leaf(node)) {
      const auto children = tree.children(node);
      const std::size_t pick = static_cast<std::size_t>(rng_.below(children.size()));
      Draw d;
      d.depth = node.size();
      d.bound = Natural(children.size());
      d.value = children[pick].back();
      d.choice = pick;
      d.activation = activation;
      trace_.prefix.push_back(d.value);
      trace_.draws.push_back(std::move(d));
      node = children[pick];
    }
  }

  std::size_t add_assumption(Assumption a) {
    a.id = trace_.assumptions.size();
    trace_.assumptions.push_back(std::move(a));
    return trace_.assumptions.size() - 1;
  }

  template <class Eligible>
  std::optional<std::size_t> pick(Eligible eligible) {
    const std::size_t n = trace_.requirements.size();
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t i = (next_ + t) % n;
      if (eligible(i)) {
        next_ = (i + 1) % n;
        return i;
      }
    }
    return std::nullopt;
  }

  void finish(Stage s) {
    trace_.final_stage = s;
    for (std::size_t i = 0; i < trace_.requirements.size(); ++i) {
      auto& st = trace_.requirements[i];
      st.met = ctx_.met(trace_.assumptions, st, trace_.prefix, s);
      if ((st.status == RequirementStatus::kWaiting ||
           st.status == RequirementStatus::kWaitingPhi) &&
          !trace_.stuck) {
        trace_.stuck = true;
        trace_.stuck_req = i;
      }
    }
  }

  Context ctx_;
  RunTrace trace_;
  Rng rng_;
  std::uint64_t cap_seed_;
  std::optional<std::size_t> blocking_;
  std::size_t next_ = 0;
};

class BoundedRun : RunnerBase {
 public:
  BoundedRun(const BoundedConfig& config, std::uint64_t seed)
      : RunnerBase(seed), config_(config) {
    if (config.depth == 0) throw std::invalid_argument("run_bounded_dnc: depth must be >= 1");
    if (config.family.mode == FamilyMode::kExact) {
      throw std::invalid_argument(
          "run_bounded_dnc: exact families are towers beyond k = 2; drive runs with a scaled "
          "family");
    }
    FamilyOptions options = config.family;
    options.k_max = std::max(options.k_max, config.depth + config.budgets.search_depth + 1);
    ctx_.family = GrowthFamily::make(options);
    const GrowthFamily& family = *ctx_.family;
    ctx_.bounded = true;
    ctx_.m = family.m();
    ctx_.search_depth = config.budgets.search_depth;
    ctx_.width_cap = config.budgets.width_cap;
    ctx_.steps_per_stage = config.budgets.steps_per_stage;
    for (std::size_t k = 0; k <= family.k_max(); ++k) ctx_.hs.push_back(family.h(k));

    trace_.algorithm = "bounded";
    trace_.m = family.m();
    trace_.depth = config.depth;
    trace_.loop_budget = default_budget(config.budgets.loop_budget, config.depth);
    trace_.steps_per_stage = ctx_.steps_per_stage;
    trace_.search_depth = ctx_.search_depth;
    trace_.width_cap = ctx_.width_cap;
    trace_.k_max = family.k_max();
    for (std::size_t k = 1; k <= family.k_max() + 1; ++k) trace_.theta.push_back(family.theta(k));
    trace_.boost = options.boost;

    Rng caps(cap_seed_);
    const PrefixFreeMachine machine;
    for (std::size_t i = 0; i < config.roster.size(); ++i) {
      const auto& req = config.roster[i];
      ctx_.gammas.push_back(req.gamma);
      ctx_.ds.push_back(req.d);
      trace_.gammas.push_back(req.gamma.name());
      trace_.ds.push_back(req.d);
      RequirementState st;
      st.cap = i < config.cap_override.size() ? config.cap_override[i]
                                              : caps.one_to(pow2(i + family.m()));
      if (st.cap < 1) throw std::invalid_argument("run_bounded_dnc: caps must be >= 1");
      trace_.requirements.push_back(st);

      std::size_t from = std::max<std::size_t>(1, req.first_attention.value_or(i + 1));
      if (config.rule == AttentionRule::kThreshold) {
        const auto k_gamma = PrefixFreeMachine::program_description(req.gamma.program()).size();
        const auto allowed = allowed_stage(req.d, family, k_gamma,
                                           PrefixFreeMachine::literal_overhead(0), family.k_max());
        from = allowed ? std::max(from, *allowed) : std::numeric_limits<std::size_t>::max();
      }
      first_.push_back(from);
    }
  }

  RunTrace run() {
    Stage s = 0;
    while (trace_.prefix.size() < config_.depth) {
      if (s >= trace_.loop_budget) {
        trace_.exhausted = true;
        break;
      }
      if (blocking_) {
        attempt_active(*blocking_, s);
      } else if (auto i = pick([&](std::size_t j) { return eligible(j); })) {
        attend(*i, s);
      } else {
        draw(ctx_.hs[trace_.prefix.size()]);
        event(s, std::nullopt, "free", "drawn");
      }
      ++s;
    }
    finish(s);
    return std::move(trace_);
  }

 private:
  bool eligible(std::size_t i) const {
    return trace_.requirements[i].status != RequirementStatus::kSatisfiedActively &&
           trace_.prefix.size() >= first_[i];
  }

  std::size_t assume(std::size_t i, Stage s) {
    Assumption a;
    a.req = i;
    a.kind = AssumptionKind::kSmall;
    a.sigma = trace_.prefix;
    a.made_at = s;
    a.threshold = ctx_.family->theta(trace_.prefix.size());
    const std::size_t id = add_assumption(std::move(a));
    trace_.requirements[i].standing = id;
    trace_.requirements[i].status = RequirementStatus::kAssuming;
    return id;
  }

  void attend(std::size_t i, Stage s) {
    auto& st = trace_.requirements[i];
    if (st.status == RequirementStatus::kUnattended) {
      event(s, i, "a", "assumed", assume(i, s));
      return;
    }
    const std::size_t id = *st.standing;
    if (!ctx_.refuted(trace_.assumptions, trace_.assumptions[id], s)) {
      draw(ctx_.hs[trace_.prefix.size()]);
      event(s, i, "b.1", "drawn", id);
      return;
    }
    trace_.assumptions[id].refuted_at = s;
    st.standing.reset();
    ++st.wrong;
    if (Natural(st.wrong) < st.cap) {
      event(s, i, "b.2.i", "assumed", assume(i, s));
      return;
    }
    st.status = RequirementStatus::kWaiting;
    blocking_ = i;
    event(s, i, "b.2.ii", "switched");
    attempt_active(i, s);
  }

  void attempt_active(std::size_t i, Stage s) {
    const OmegaString sigma = trace_.prefix;
    const Natural theta = ctx_.family->theta(sigma.size());
    const CachePtr c = ctx_.cache(i, s);
    auto found = find_rho_star(
        [&](const BitString& rho) { return ctx_.member(theta, rho, c); }, sigma,
        static_cast<std::size_t>(to_u64(theta, "theta")), ctx_.family->restriction_fn(sigma.size()),
        ctx_.caps_above(sigma));
    if (!found) {
      event(s, i, "b.2.ii", "waiting");
      return;
    }
    Activation act;
    act.req = i;
    act.stage = s;
    act.sigma = sigma;
    act.rho = found->first;
    act.threshold = theta;
    act.tree = std::move(found->second);
    trace_.activations.push_back(std::move(act));
    auto& st = trace_.requirements[i];
    st.activation = trace_.activations.size() - 1;
    st.status = RequirementStatus::kSatisfiedActively;
    blocking_.reset();
    walk(*st.activation);
    event(s, i, "b.2.ii", "satisfied");
  }

  const BoundedConfig& config_;
  std::vector<std::size_t> first_;
};

class UnboundedRun : RunnerBase {
 public:
  UnboundedRun(const UnboundedConfig& config, std::uint64_t seed)
      : RunnerBase(seed), config_(config) {
    if (config.depth == 0) throw std::invalid_argument("run_unbounded_dnc: depth must be >= 1");
    ctx_.bounded = false;
    ctx_.m = config.m;
    ctx_.search_depth = config.budgets.search_depth;
    ctx_.width_cap = config.budgets.width_cap;
    ctx_.steps_per_stage = config.budgets.steps_per_stage;

    trace_.algorithm = "unbounded";
    trace_.m = config.m;
    trace_.depth = config.depth;
    trace_.loop_budget = default_budget(config.budgets.loop_budget, config.depth);
    trace_.steps_per_stage = ctx_.steps_per_stage;
    trace_.search_depth = ctx_.search_depth;
    trace_.width_cap = ctx_.width_cap;
    for (std::size_t i = 0; i < config.roster.size(); ++i) {
      const auto& req = config.roster[i];
      ctx_.gammas.push_back(req.gamma);
      ctx_.phis.push_back(req.phi);
      ctx_.ds.push_back(req.d);
      trace_.gammas.push_back(req.gamma.name());
      trace_.phis.push_back(req.phi.to_string());
      trace_.ds.push_back(req.d);
      RequirementState st;
      if (auto it = config.n1_override.find(i); it != config.n1_override.end()) {
        st.cap = it->second;
      } else {
        const Natural t = triple(i, 1, 0);
        Rng r(derive_seed(cap_seed_, low64(t)));
        st.cap = r.one_to(pow2_nat(t + config.m));
      }
      trace_.requirements.push_back(st);
    }
    wait_r_.assign(config.roster.size(), 0);
  }

  RunTrace run() {
    Stage s = 0;
    while (trace_.prefix.size() < config_.depth) {
      if (s >= trace_.loop_budget) {
        trace_.exhausted = true;
        break;
      }
      if (blocking_) {
        attempt_rho(*blocking_, s);
      } else if (auto i = pick([&](std::size_t j) { return eligible(j); })) {
        attend(*i, s);
      } else {
        draw(bound(trace_.prefix.size()), list_);
        event(s, std::nullopt, "free", "drawn");
      }
      ++s;
    }
    finish(s);
    return std::move(trace_);
  }

 private:
  bool eligible(std::size_t i) const {
    return trace_.requirements[i].status != RequirementStatus::kSatisfiedActively &&
           trace_.prefix.size() >= config_.roster[i].first_attention;
  }

  Natural bound(std::size_t depth) const {
    return unbounded_bound(trace_.assumptions, list_, config_.m)(depth);
  }

  Natural cap2(std::size_t i, std::uint64_t b) {
    auto& st = trace_.requirements[i];
    if (auto it = st.caps2.find(b); it != st.caps2.end()) return it->second;
    Natural cap;
    if (auto it = config_.n2_override.find({i, b}); it != config_.n2_override.end()) {
      cap = it->second;
    } else {
      const Natural t = triple(i, 2, b);
      Rng r(derive_seed(cap_seed_, low64(t)));
      cap = r.one_to(pow2_nat(t + config_.m));
    }
    st.caps2.emplace(b, cap);
    return cap;
  }

  // Upper bound on the code length of (sigma, Gamma, phi, d, L): the bits of the
  // canonical serialization plus the literal overhead of the prefix-free machine.
  Natural description_bound(std::size_t i) const {
    json j;
    json sigma = json::array();
    for (const auto& v : trace_.prefix.values()) sigma.push_back(v.str());
    j["sigma"] = std::move(sigma);
    j["gamma"] = ctx_.gammas[i].program().to_string();
    j["phi"] = ctx_.phis[i].to_string();
    j["d"] = ctx_.ds[i];
    json list = json::array();
    for (std::size_t id : list_) {
      const Assumption& a = trace_.assumptions[id];
      list.push_back({{"req", a.req},
                      {"kind", to_string(a.kind)},
                      {"threshold", a.threshold.str()},
                      {"r", a.r.str()}});
    }
    j["L"] = std::move(list);
    const std::size_t bits = 8 * j.dump().size();
    return Natural(bits + PrefixFreeMachine::literal_overhead(bits));
  }

  void remove_from_list(std::size_t id) {
    list_.erase(std::remove(list_.begin(), list_.end(), id), list_.end());
  }

  std::size_t make_c1(std::size_t i, Stage s, const Natural& r) {
    Assumption a;
    a.req = i;
    a.kind = AssumptionKind::kPhiUndefined;
    a.sigma = trace_.prefix;
    a.made_at = s;
    a.r = r;
    const std::size_t id = add_assumption(std::move(a));
    list_.push_back(id);
    trace_.requirements[i].standing = id;
    trace_.requirements[i].status = RequirementStatus::kAssuming;
    return id;
  }

  std::size_t make_c2(std::size_t i, Stage s, std::uint64_t v) {
    Assumption a;
    a.req = i;
    a.kind = AssumptionKind::kPhiSmall;
    a.sigma = trace_.prefix;
    a.made_at = s;
    a.threshold = v;
    a.r = wait_r_[i];
    a.list = list_;
    const std::size_t id = add_assumption(std::move(a));
    list_.push_back(id);
    trace_.requirements[i].standing = id;
    trace_.requirements[i].status = RequirementStatus::kAssuming;
    return id;
  }

  void attempt_phi(std::size_t i, Stage s) {
    if (auto v = ctx_.phi_value(i, wait_r_[i], s)) {
      event(s, i, "b.2.ii", "assumed", make_c2(i, s, *v));
    } else {
      event(s, i, "b.2.ii", "waiting");
    }
  }

  void attend(std::size_t i, Stage s) {
    auto& st = trace_.requirements[i];
    const Natural r = description_bound(i);
    if (st.status == RequirementStatus::kUnattended) {
      event(s, i, "a", "assumed", make_c1(i, s, r));
      return;
    }
    if (st.status == RequirementStatus::kWaitingPhi) {
      attempt_phi(i, s);
      return;
    }
    const std::size_t id = *st.standing;
    const AssumptionKind kind = trace_.assumptions[id].kind;
    if (!ctx_.refuted(trace_.assumptions, trace_.assumptions[id], s)) {
      draw(bound(trace_.prefix.size()), list_);
      event(s, i, "b.1", "drawn", id);
      return;
    }
    trace_.assumptions[id].refuted_at = s;
    remove_from_list(id);
    st.standing.reset();
    if (kind == AssumptionKind::kPhiUndefined) {
      ++st.wrong_c1;
      if (Natural(st.wrong_c1) < cap2(i, st.wrong)) {
        event(s, i, "b.2.i", "assumed", make_c1(i, s, r));
        return;
      }
      st.status = RequirementStatus::kWaitingPhi;
      wait_r_[i] = r;
      event(s, i, "b.2.ii", "switched");
      attempt_phi(i, s);
      return;
    }
    ++st.wrong;
    if (Natural(st.wrong) < st.cap) {
      st.wrong_c1 = 0;
      event(s, i, "b.3.i", "assumed", make_c1(i, s, r));
      return;
    }
    st.status = RequirementStatus::kWaiting;
    blocking_ = i;
    wait_r_[i] = r;
    event(s, i, "b.3.ii", "switched");
    attempt_rho(i, s);
  }

  void attempt_rho(std::size_t i, Stage s) {
    const auto v = ctx_.phi_value(i, wait_r_[i], s);
    if (!v) {
      event(s, i, "b.3.ii", "waiting");
      return;
    }
    const OmegaString sigma = trace_.prefix;
    const CachePtr c = ctx_.cache(i, s);
    const Natural threshold(*v);
    auto found = find_rho_star(
        [&](const BitString& rho) { return ctx_.member(threshold, rho, c); }, sigma,
        static_cast<std::size_t>(*v), unbounded_bound(trace_.assumptions, list_, config_.m),
        ctx_.caps_above(sigma));
    if (!found) {
      event(s, i, "b.3.ii", "waiting");
      return;
    }
    Activation act;
    act.req = i;
    act.stage = s;
    act.sigma = sigma;
    act.rho = found->first;
    act.threshold = threshold;
    act.r = wait_r_[i];
    act.tree = std::move(found->second);
    act.list = list_;
    trace_.activations.push_back(std::move(act));
    auto& st = trace_.requirements[i];
    st.activation = trace_.activations.size() - 1;
    st.status = RequirementStatus::kSatisfiedActively;
    blocking_.reset();
    walk(*st.activation);
    event(s, i, "b.3.ii", "satisfied");
  }

  const UnboundedConfig& config_;
  std::vector<std::size_t> list_;
  std::vector<Natural> wait_r_;
};

Context context_from_trace(const RunTrace& trace) {
  Context ctx;
  ctx.bounded = trace.algorithm == "bounded";
  ctx.m = trace.m;
  ctx.search_depth = trace.search_depth;
  ctx.width_cap = trace.width_cap;
  ctx.steps_per_stage = trace.steps_per_stage;
  if (ctx.bounded) {
    ctx.family = trace_family(trace);
    for (std::size_t k = 0; k <= ctx.family->k_max(); ++k) ctx.hs.push_back(ctx.family->h(k));
  }
  for (const auto& name : trace.gammas) ctx.gammas.push_back(Functional::named(name));
  for (const auto& text : trace.phis) ctx.phis.push_back(ToyProgram::parse(text));
  ctx.ds = trace.ds;
  return ctx;
}

}  // namespace

RunTrace run_bounded_dnc(const BoundedConfig& config, std::uint64_t seed) {
  return BoundedRun(config, seed).run();
}

RunTrace run_unbounded_dnc(const UnboundedConfig& config, std::uint64_t seed) {
  return UnboundedRun(config, seed).run();
}

std::optional<std::pair<BitString, WitnessTree>> find_rho_star(
    const std::function<Membership(const BitString&)>& s_rho, const OmegaString& sigma,
    std::size_t length, const GrowthFn& g, Caps caps) {
  std::function<std::optional<std::pair<BitString, WitnessTree>>(const BitString&)> search =
      [&](const BitString& rho) -> std::optional<std::pair<BitString, WitnessTree>> {
    auto tree = is_big_bounded(s_rho(rho), sigma, g, caps);
    if (!tree) return std::nullopt;
    if (rho.size() == length) return std::make_pair(rho, std::move(*tree));
    for (char bit : {'0', '1'}) {
      if (auto found = search(rho + bit)) return found;
    }
    return std::nullopt;
  };
  return search("");
}

GrowthFn unbounded_bound(const std::vector<Assumption>& assumptions,
                         const std::vector<std::size_t>& list, unsigned m) {
  std::vector<GrowthFn> terms{GrowthFn::constant(1)};
  for (std::size_t id : list) {
    const Assumption& a = assumptions.at(id);
    if (a.kind != AssumptionKind::kPhiSmall) continue;
    for (std::size_t inner : a.list) {
      if (inner >= id) throw std::invalid_argument("assumption list refers forward");
    }
    terms.push_back(GrowthFn::times_pow2(unbounded_bound(assumptions, a.list, m),
                                         to_u64(a.threshold, "phi(r + d)")));
  }
  return GrowthFn::scaled_by_pow2(GrowthFn::sum_of(terms), m);
}

GrowthFamily trace_family(const RunTrace& trace) {
  if (trace.algorithm != "bounded") throw std::invalid_argument("trace_family: not a bounded trace");
  FamilyOptions options;
  options.m = trace.m;
  options.mode = FamilyMode::kScaled;
  options.k_max = trace.k_max;
  options.scaled_threshold.push_back(0);
  for (const auto& t : trace.theta) options.scaled_threshold.push_back(to_u64(t, "theta"));
  options.boost = trace.boost;
  return GrowthFamily::make(options);
}

TraceAudit audit_trace(const RunTrace& trace, const DiagonalTable* table,
                       std::uint64_t k_budget) {
  TraceAudit audit;
  auto fail = [&](std::string what) { audit.violations.push_back(std::move(what)); };
  Context ctx;
  try {
    ctx = context_from_trace(trace);
  } catch (const std::exception& e) {
    fail(std::string("configuration: ") + e.what());
    return audit;
  }
  const auto& all = trace.assumptions;
  const std::size_t n_req = trace.requirements.size();
  if (trace.gammas.size() != n_req || trace.ds.size() != n_req ||
      (!ctx.bounded && trace.phis.size() != n_req)) {
    fail("roster size does not match the requirement count");
    return audit;
  }

  auto check_list = [&](const std::vector<std::size_t>& list, const std::string& where,
                        std::optional<Stage> at) {
    ++audit.lists_checked;
    std::set<std::size_t> reqs;
    for (std::size_t id : list) {
      if (id >= all.size()) {
        fail(where + ": list names unknown assumption " + std::to_string(id));
        continue;
      }
      if (!reqs.insert(all[id].req).second) {
        fail(where + ": two active assumptions for requirement " + std::to_string(all[id].req));
      }
      if (at && all[id].made_at > *at) fail(where + ": list holds a later assumption");
      if (at && all[id].refuted_at && *all[id].refuted_at <= *at) {
        fail(where + ": list holds an assumption already refuted");
      }
    }
  };

  // Draws: values, bounds, floor, and the prefix they spell.
  if (trace.draws.size() != trace.prefix.size()) fail("draw count differs from prefix length");
  for (std::size_t j = 0; j < trace.draws.size(); ++j) {
    const Draw& d = trace.draws[j];
    const std::string where = "draw " + std::to_string(j);
    ++audit.draws_checked;
    if (d.depth != j) fail(where + ": recorded depth " + std::to_string(d.depth));
    if (j < trace.prefix.size() && trace.prefix[j] != d.value) fail(where + ": differs from prefix");
    const Natural drawn = d.activation ? Natural(d.choice.value_or(0)) : d.value;
    if (d.activation && !d.choice) fail(where + ": restricted draw without a choice index");
    if (d.value < 0 || drawn >= d.bound) fail(where + ": draw is not below its bound");
    if (d.bound < pow2(j + trace.m)) fail(where + ": bound below 2^{n+m}");
    if (d.activation) continue;
    try {
      Natural expected;
      if (ctx.bounded) {
        expected = ctx.hs.at(j);
      } else {
        check_list(d.list, where, std::nullopt);
        expected = unbounded_bound(all, d.list, trace.m)(j);
      }
      if (d.bound != expected) fail(where + ": bound differs from the recomputed one");
    } catch (const std::exception& e) {
      fail(where + ": " + e.what());
    }
  }

  // Restrictions: each activation's draws follow its tree from the stem to a leaf.
  std::vector<std::size_t> per_req(n_req, 0);
  for (std::size_t a = 0; a < trace.activations.size(); ++a) {
    const Activation& act = trace.activations[a];
    const std::string where = "activation " + std::to_string(a);
    if (act.req >= n_req) {
      fail(where + ": unknown requirement");
      continue;
    }
    if (++per_req[act.req] > 1) fail(where + ": requirement satisfied twice");
    if (trace.requirements[act.req].status != RequirementStatus::kSatisfiedActively ||
        trace.requirements[act.req].activation != a) {
      fail(where + ": requirement status does not record it");
    }
    const std::string branch = ctx.bounded ? "b.2.ii" : "b.3.ii";
    const bool has_event = std::any_of(trace.events.begin(), trace.events.end(), [&](const auto& e) {
      return e.req == act.req && e.step == branch && e.outcome == "satisfied" && e.stage == act.stage;
    });
    if (!has_event) fail(where + ": no matching " + branch + " satisfaction event");
    if (!(act.tree.stem() == act.sigma)) fail(where + ": tree stem differs from sigma");
    if (!act.sigma.is_prefix_of(trace.prefix)) fail(where + ": sigma is not a prefix of A");

    OmegaString node = act.sigma;
    for (const Draw& d : trace.draws) {
      if (d.activation != a) continue;
      if (d.depth != node.size()) {
        fail(where + ": restricted draws are not contiguous from sigma");
        break;
      }
      const auto children = act.tree.children(node);
      if (d.bound != Natural(children.size())) fail(where + ": bound differs from child count");
      if (d.choice && *d.choice < children.size() && children[*d.choice].back() != d.value) {
        fail(where + ": value is not the chosen child");
      }
      node = node.child(d.value);
      if (!act.tree.contains(node)) {
        fail(where + ": walk left the tree");
        break;
      }
    }
    if (act.tree.contains(node) && !act.tree.is_leaf(node)) fail(where + ": walk stopped before a leaf");

    try {
      Natural expected = ctx.bounded ? ctx.family->theta(act.sigma.size()) : Natural(0);
      if (!ctx.bounded) {
        const auto v = ctx.phi_value(act.req, act.r, act.stage);
        if (!v) fail(where + ": phi(r + d) undefined at the activation stage");
        expected = v ? Natural(*v) : Natural(-1);
      }
      if (act.threshold != expected) fail(where + ": recorded |rho| target is wrong");
      if (Natural(act.rho.size()) != act.threshold) fail(where + ": |rho| differs from its target");
      if (!ctx.bounded) check_list(act.list, where, act.stage);
      const Membership in = ctx.member(act.threshold, act.rho, ctx.cache(act.req, act.stage));
      if (!verify_witness(act.tree, in, ctx.search_fn(all, act))) {
        fail(where + ": witness tree does not verify");
      }
      ++audit.witnesses_checked;
    } catch (const std::exception& e) {
      fail(where + ": " + e.what());
    }
  }

  // Assumptions: recorded refutations must be real.
  for (std::size_t id = 0; id < all.size(); ++id) {
    const Assumption& a = all[id];
    const std::string where = "assumption " + std::to_string(id);
    if (a.id != id || a.req >= n_req) {
      fail(where + ": bad id or requirement");
      continue;
    }
    try {
      if (ctx.bounded) {
        if (a.kind != AssumptionKind::kSmall) fail(where + ": wrong kind for a bounded run");
        if (a.threshold != ctx.family->theta(a.sigma.size())) fail(where + ": wrong threshold");
      } else if (a.kind == AssumptionKind::kSmall) {
        fail(where + ": wrong kind for an unbounded run");
      } else if (a.kind == AssumptionKind::kPhiSmall) {
        const auto v = ctx.phi_value(a.req, a.r, a.made_at);
        if (!v || Natural(*v) != a.threshold) fail(where + ": threshold is not phi(r + d)");
        for (std::size_t inner : a.list) {
          if (inner >= id) fail(where + ": list refers forward");
        }
        check_list(a.list, where, a.made_at);
      }
      if (a.refuted_at) {
        ++audit.refutations_checked;
        if (!ctx.refuted(all, a, *a.refuted_at)) fail(where + ": recorded refutation does not hold");
      }
    } catch (const std::exception& e) {
      fail(where + ": " + e.what());
    }
  }

  // Final statuses.
  for (std::size_t i = 0; i < n_req; ++i) {
    const auto& st = trace.requirements[i];
    const std::string where = "requirement " + std::to_string(i);
    try {
      if (st.status == RequirementStatus::kAssuming && st.standing) {
        const Assumption& a = all.at(*st.standing);
        if (a.refuted_at) fail(where + ": standing assumption is marked refuted");
        if (!ctx.refuted(all, a, trace.final_stage) && ctx.hits(a, trace.prefix, trace.final_stage)) {
          ++audit.true_set_hits;
        }
      }
      if (ctx.met(all, st, trace.prefix, trace.final_stage) != st.met) {
        fail(where + ": recorded met flag is wrong");
      }
    } catch (const std::exception& e) {
      fail(where + ": " + e.what());
    }
  }
  if (trace.stuck) {
    const bool waiting = trace.stuck_req && *trace.stuck_req < n_req &&
                         (trace.requirements[*trace.stuck_req].status == RequirementStatus::kWaiting ||
                          trace.requirements[*trace.stuck_req].status == RequirementStatus::kWaitingPhi);
    if (!waiting) fail("stuck without a waiting requirement");
  }

  if (table) audit.dnc = is_dnc_prefix(trace.prefix, *table, table->max_steps());

  const PrefixFreeMachine machine;
  for (const Activation& act : trace.activations) {
    RhoDiagnostic diag;
    diag.req = act.req;
    diag.rho = act.rho;
    diag.k_approx = machine.k_approx(act.rho, k_budget);
    diag.margin = static_cast<std::int64_t>(diag.k_approx) - static_cast<std::int64_t>(act.rho.size());
    if (ctx.bounded && !act.sigma.empty() && act.req < ctx.gammas.size()) {
      const auto k_gamma = PrefixFreeMachine::program_description(ctx.gammas[act.req].program()).size();
      diag.threshold = requirement_threshold(act.sigma.size(), *ctx.family, k_gamma,
                                             PrefixFreeMachine::literal_overhead(0));
    }
    audit.rhos.push_back(std::move(diag));
  }
  return audit;
}

RunSummary summarize(const RunTrace& trace, const DiagonalTable& table) {
  RunSummary s;
  s.stuck = trace.stuck;
  s.exhausted = trace.exhausted;
  s.all_met = trace.all_attended_met();
  s.dnc = is_dnc_prefix(trace.prefix, table, table.max_steps());
  for (const auto& st : trace.requirements) {
    if (st.status == RequirementStatus::kUnattended) continue;
    ++s.attended;
    if (st.met) ++s.met;
    if (st.status == RequirementStatus::kSatisfiedActively) ++s.active;
  }
  for (const auto& e : trace.events) ++s.steps[e.step];
  return s;
}

namespace {

json nat_j(const Natural& n) { return n.str(); }
Natural j_nat(const json& j) { return Natural(j.get<std::string>()); }

json omega_j(const OmegaString& s) {
  json out = json::array();
  for (const auto& v : s.values()) out.push_back(v.str());
  return out;
}

OmegaString j_omega(const json& j) {
  OmegaString s;
  for (const auto& v : j) s.push_back(j_nat(v));
  return s;
}

template <class T>
json opt_j(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> j_opt(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<T>();
}

RequirementStatus parse_status(const std::string& s) {
  for (auto st : {RequirementStatus::kUnattended, RequirementStatus::kAssuming,
                  RequirementStatus::kWaitingPhi, RequirementStatus::kWaiting,
                  RequirementStatus::kSatisfiedActively}) {
    if (s == to_string(st)) return st;
  }
  throw std::invalid_argument("unknown requirement status " + s);
}

AssumptionKind parse_kind(const std::string& s) {
  for (auto k : {AssumptionKind::kSmall, AssumptionKind::kPhiUndefined, AssumptionKind::kPhiSmall}) {
    if (s == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown assumption kind " + s);
}

json event_j(const TraceEvent& e) {
  return json{{"stage", e.stage},   {"req", opt_j(e.req)},
              {"step", e.step},     {"outcome", e.outcome},
              {"assumption", opt_j(e.assumption)}, {"depth", e.depth}};
}

}  // namespace

std::string trace_to_json(const RunTrace& t) {
  json j;
  j["algorithm"] = t.algorithm;
  j["m"] = t.m;
  j["seed"] = t.seed;
  j["depth"] = t.depth;
  j["loop_budget"] = t.loop_budget;
  j["steps_per_stage"] = t.steps_per_stage;
  j["search_depth"] = t.search_depth;
  j["width_cap"] = t.width_cap;
  json theta = json::array();
  for (const auto& v : t.theta) theta.push_back(nat_j(v));
  j["theta"] = std::move(theta);
  j["boost"] = t.boost;
  j["k_max"] = t.k_max;
  j["gammas"] = t.gammas;
  j["phis"] = t.phis;
  j["ds"] = t.ds;
  j["prefix"] = omega_j(t.prefix);
  json draws = json::array();
  for (const auto& d : t.draws) {
    draws.push_back({{"depth", d.depth},
                     {"bound", nat_j(d.bound)},
                     {"value", nat_j(d.value)},
                     {"choice", opt_j(d.choice)},
                     {"activation", opt_j(d.activation)},
                     {"list", d.list}});
  }
  j["draws"] = std::move(draws);
  json assumptions = json::array();
  for (const auto& a : t.assumptions) {
    assumptions.push_back({{"id", a.id},
                           {"req", a.req},
                           {"kind", to_string(a.kind)},
                           {"sigma", omega_j(a.sigma)},
                           {"made_at", a.made_at},
                           {"refuted_at", opt_j(a.refuted_at)},
                           {"threshold", nat_j(a.threshold)},
                           {"r", nat_j(a.r)},
                           {"list", a.list}});
  }
  j["assumptions"] = std::move(assumptions);
  json activations = json::array();
  for (const auto& a : t.activations) {
    json nodes = json::array();
    for (const auto& n : a.tree.nodes()) nodes.push_back(omega_j(n));
    activations.push_back({{"req", a.req},
                           {"stage", a.stage},
                           {"sigma", omega_j(a.sigma)},
                           {"rho", a.rho},
                           {"threshold", nat_j(a.threshold)},
                           {"r", nat_j(a.r)},
                           {"tree", {{"stem", omega_j(a.tree.stem())}, {"nodes", std::move(nodes)}}},
                           {"list", a.list}});
  }
  j["activations"] = std::move(activations);
  json events = json::array();
  for (const auto& e : t.events) events.push_back(event_j(e));
  j["events"] = std::move(events);
  json reqs = json::array();
  for (const auto& st : t.requirements) {
    json caps2 = json::object();
    for (const auto& [b, cap] : st.caps2) caps2[std::to_string(b)] = nat_j(cap);
    reqs.push_back({{"cap", nat_j(st.cap)},
                    {"caps2", std::move(caps2)},
                    {"wrong", st.wrong},
                    {"wrong_c1", st.wrong_c1},
                    {"status", to_string(st.status)},
                    {"standing", opt_j(st.standing)},
                    {"activation", opt_j(st.activation)},
                    {"met", st.met}});
  }
  j["requirements"] = std::move(reqs);
  j["stuck"] = t.stuck;
  j["stuck_req"] = opt_j(t.stuck_req);
  j["exhausted"] = t.exhausted;
  j["final_stage"] = t.final_stage;
  return j.dump();
}

RunTrace trace_from_json(const std::string& text) {
  const json j = json::parse(text);
  RunTrace t;
  t.algorithm = j.at("algorithm").get<std::string>();
  t.m = j.at("m").get<unsigned>();
  t.seed = j.at("seed").get<std::uint64_t>();
  t.depth = j.at("depth").get<std::size_t>();
  t.loop_budget = j.at("loop_budget").get<Stage>();
  t.steps_per_stage = j.at("steps_per_stage").get<std::uint64_t>();
  t.search_depth = j.at("search_depth").get<std::size_t>();
  t.width_cap = j.at("width_cap").get<std::size_t>();
  for (const auto& v : j.at("theta")) t.theta.push_back(j_nat(v));
  t.boost = j.at("boost").get<std::vector<std::int64_t>>();
  t.k_max = j.at("k_max").get<std::size_t>();
  t.gammas = j.at("gammas").get<std::vector<std::string>>();
  t.phis = j.at("phis").get<std::vector<std::string>>();
  t.ds = j.at("ds").get<std::vector<std::int64_t>>();
  t.prefix = j_omega(j.at("prefix"));
  for (const auto& d : j.at("draws")) {
    Draw draw;
    draw.depth = d.at("depth").get<std::size_t>();
    draw.bound = j_nat(d.at("bound"));
    draw.value = j_nat(d.at("value"));
    draw.choice = j_opt<std::uint64_t>(d.at("choice"));
    draw.activation = j_opt<std::size_t>(d.at("activation"));
    draw.list = d.at("list").get<std::vector<std::size_t>>();
    t.draws.push_back(std::move(draw));
  }
  for (const auto& a : j.at("assumptions")) {
    Assumption as;
    as.id = a.at("id").get<std::size_t>();
    as.req = a.at("req").get<std::size_t>();
    as.kind = parse_kind(a.at("kind").get<std::string>());
    as.sigma = j_omega(a.at("sigma"));
    as.made_at = a.at("made_at").get<Stage>();
    as.refuted_at = j_opt<Stage>(a.at("refuted_at"));
    as.threshold = j_nat(a.at("threshold"));
    as.r = j_nat(a.at("r"));
    as.list = a.at("list").get<std::vector<std::size_t>>();
    t.assumptions.push_back(std::move(as));
  }
  for (const auto& a : j.at("activations")) {
    Activation act;
    act.req = a.at("req").get<std::size_t>();
    act.stage = a.at("stage").get<Stage>();
    act.sigma = j_omega(a.at("sigma"));
    act.rho = a.at("rho").get<std::string>();
    act.threshold = j_nat(a.at("threshold"));
    act.r = j_nat(a.at("r"));
    act.tree = WitnessTree(j_omega(a.at("tree").at("stem")));
    for (const auto& n : a.at("tree").at("nodes")) act.tree.add_path(j_omega(n));
    act.list = a.at("list").get<std::vector<std::size_t>>();
    t.activations.push_back(std::move(act));
  }
  for (const auto& e : j.at("events")) {
    TraceEvent ev;
    ev.stage = e.at("stage").get<Stage>();
    ev.req = j_opt<std::size_t>(e.at("req"));
    ev.step = e.at("step").get<std::string>();
    ev.outcome = e.at("outcome").get<std::string>();
    ev.assumption = j_opt<std::size_t>(e.at("assumption"));
    ev.depth = e.at("depth").get<std::size_t>();
    t.events.push_back(std::move(ev));
  }
  for (const auto& r : j.at("requirements")) {
    RequirementState st;
    st.cap = j_nat(r.at("cap"));
    for (const auto& [b, cap] : r.at("caps2").items()) st.caps2[std::stoull(b)] = j_nat(cap);
    st.wrong = r.at("wrong").get<std::uint64_t>();
    st.wrong_c1 = r.at("wrong_c1").get<std::uint64_t>();
    st.status = parse_status(r.at("status").get<std::string>());
    st.standing = j_opt<std::size_t>(r.at("standing"));
    st.activation = j_opt<std::size_t>(r.at("activation"));
    st.met = r.at("met").get<bool>();
    t.requirements.push_back(std::move(st));
  }
  t.stuck = j.at("stuck").get<bool>();
  t.stuck_req = j_opt<std::size_t>(j.at("stuck_req"));
  t.exhausted = j.at("exhausted").get<bool>();
  t.final_stage = j.at("final_stage").get<Stage>();
  return t;
}

std::string trace_events_jsonl(const RunTrace& trace) {
  std::string out;
  for (const auto& e : trace.events) out += event_j(e).dump() + "\n";
  return out;
}

}  // namespace bushy
