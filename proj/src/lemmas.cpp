#include "bushy/lemmas.hpp"

#include <map>

#include "bushy/random.hpp"

namespace bushy {

namespace {

class Exhaustive {
 public:
  Exhaustive(const StringSet& b, const GrowthFn& g, Caps caps) : b_(b), g_(g), caps_(caps) {}

  bool big(const OmegaString& node) {
    if (auto it = memo_.find(node); it != memo_.end()) return it->second;
    const bool result = compute(node);
    memo_.emplace(node, result);
    return result;
  }

 private:
  bool compute(const OmegaString& node) {
    if (b_.count(node)) return true;
    if (node.size() >= caps_.depth_cap) return false;
    const std::size_t w = caps_.width_cap;
    const Natural need = g_(node.size());
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << w); ++mask) {
      if (Natural(__builtin_popcountll(mask)) < need) continue;
      bool all = true;
      for (std::size_t v = 0; v < w && all; ++v) {
        if (mask & (std::uint64_t{1} << v)) all = big(node.child(Natural(v)));
      }
      if (all) return true;
    }
    return false;
  }

  const StringSet& b_;
  const GrowthFn& g_;
  Caps caps_;
  std::map<OmegaString, bool> memo_;
};

StringSet random_set(Rng& rng, Caps caps, std::uint64_t per_mille) {
  StringSet out;
  for_each_grid_node(OmegaString{}, caps, [&](const OmegaString& x) {
    if (rng.below(std::uint64_t{1000}) < per_mille) out.insert(x);
  });
  return out;
}

GrowthFn random_g(Rng& rng, std::size_t depth, std::size_t width) {
  std::vector<Natural> values;
  for (std::size_t i = 0; i <= depth; ++i) values.emplace_back(rng.below(width + 2));
  return GrowthFn::table(values, "g");
}

OmegaString random_node(Rng& rng, Caps caps) {
  OmegaString s;
  const std::size_t len = rng.below(std::uint64_t{caps.depth_cap + 1});
  for (std::size_t i = 0; i < len; ++i) s.push_back(Natural(rng.below(caps.width_cap)));
  return s;
}

std::string describe(std::size_t instance, const OmegaString& sigma, Caps caps) {
  return "instance " + std::to_string(instance) + " sigma " + sigma.to_string() + " caps (" +
         std::to_string(caps.depth_cap) + "," + std::to_string(caps.width_cap) + ")";
}

}  // namespace

bool exhaustive_big(const StringSet& b, const OmegaString& sigma, const GrowthFn& g, Caps caps) {
  if (caps.width_cap >= 63) throw std::invalid_argument("exhaustive_big: width_cap too large");
  return Exhaustive(b, g, caps).big(sigma);
}

bool LemmaReport::ok() const {
  for (const auto& c : checks) {
    if (!c.failures.empty()) return false;
  }
  return true;
}

LemmaReport run_lemma_suite(const LemmaSuiteConfig& config) {
  LemmaReport report;
  report.instances = config.instances;
  LemmaCheck agreement{"agreement", 0, 0, {}};
  LemmaCheck concatenation{"concatenation", 0, 0, {}};
  LemmaCheck additivity{"additivity", 0, 0, {}};
  LemmaCheck closure_check{"closure", 0, 0, {}};

  for (std::size_t n = 0; n < config.instances; ++n) {
    Rng rng(derive_seed(config.seed, n));
    const Caps caps{1 + rng.below(std::uint64_t{config.max_depth}),
                    1 + rng.below(std::uint64_t{config.max_width})};
    const GrowthFn g = random_g(rng, caps.depth_cap, caps.width_cap);
    const OmegaString sigma = random_node(rng, caps);
    const std::string where = describe(n, sigma, caps);
    const std::uint64_t density = 100 + rng.below(std::uint64_t{700});

    // Agreement with exhaustive witness search, and witness round-trip.
    const StringSet b = random_set(rng, caps, density);
    const auto tree = is_big_bounded(b, sigma, g, caps);
    ++agreement.checked;
    if (tree.has_value() != exhaustive_big(b, sigma, g, caps)) {
      agreement.failures.push_back(where + ": is_big_bounded disagrees with exhaustive search");
    } else if (tree && !verify_witness(*tree, b, g)) {
      agreement.failures.push_back(where + ": returned witness does not verify");
    }

    // Concatenation: glue a witness for A with witnesses for S_tau at its leaves.
    if (!tree) {
      ++concatenation.vacuous;
    } else {
      WitnessTree glued = *tree;
      StringSet glued_set;
      bool premise = true;
      for (const auto& leaf : tree->leaves()) {
        StringSet s_tau;
        for (const auto& x : random_set(rng, caps, density)) {
          if (leaf.is_prefix_of(x)) s_tau.insert(x);
        }
        if (rng.below(std::uint64_t{4}) == 0) s_tau.insert(leaf);
        const auto leaf_tree = is_big_bounded(s_tau, leaf, g, caps);
        if (!leaf_tree) {
          premise = false;
          break;
        }
        for (const auto& node : leaf_tree->nodes()) glued.add_path(node);
        glued_set.insert(s_tau.begin(), s_tau.end());
      }
      if (!premise) {
        ++concatenation.vacuous;
      } else {
        ++concatenation.checked;
        if (!verify_witness(glued, glued_set, g)) {
          concatenation.failures.push_back(where + ": glued tree does not verify");
        }
        if (!is_big_bounded(glued_set, sigma, g, caps)) {
          concatenation.failures.push_back(where + ": union of S_tau is not big");
        }
      }
    }

    // Additivity, contrapositive: big for g1 + g2 implies B1 g1-big or B2 g2-big.
    const StringSet b1 = random_set(rng, caps, density / 2);
    const StringSet b2 = random_set(rng, caps, density / 2);
    const GrowthFn g1 = random_g(rng, caps.depth_cap, caps.width_cap);
    const GrowthFn g2 = random_g(rng, caps.depth_cap, caps.width_cap);
    StringSet both = b1;
    both.insert(b2.begin(), b2.end());
    if (!is_big_bounded(both, sigma, GrowthFn::sum_of({g1, g2}), caps)) {
      ++additivity.vacuous;
    } else {
      ++additivity.checked;
      if (!is_big_bounded(b1, sigma, g1, caps) && !is_big_bounded(b2, sigma, g2, caps)) {
        additivity.failures.push_back(where + ": union big for g1+g2 but neither part big");
      }
    }

    // Closure: idempotent, contains B, and preserves smallness above sigma.
    ++closure_check.checked;
    const StringSet c = closure(b, g, caps);
    if (closure(c, g, caps) != c) closure_check.failures.push_back(where + ": not idempotent");
    for (const auto& x : b) {
      if (!c.count(x)) {
        closure_check.failures.push_back(where + ": closure misses " + x.to_string());
        break;
      }
    }
    if (!tree && is_big_bounded(c, sigma, g, caps)) {
      closure_check.failures.push_back(where + ": closure of a small set is big");
    }
  }
  report.checks = {agreement, concatenation, additivity, closure_check};
  return report;
}

}  // namespace bushy
