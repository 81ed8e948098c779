#include "bushy/bushy_core.hpp"

#include <algorithm>
#include <map>

namespace bushy {

WitnessTree::WitnessTree(OmegaString stem) : stem_(std::move(stem)) { add_path(stem_); }

void WitnessTree::add_path(const OmegaString& node) {
  for (std::size_t n = 0; n <= node.size(); ++n) nodes_.insert(node.prefix(n));
}

bool WitnessTree::is_leaf(const OmegaString& node) const {
  auto it = nodes_.upper_bound(node);
  return it == nodes_.end() || !node.is_prefix_of(*it);
}

std::vector<OmegaString> WitnessTree::children(const OmegaString& node) const {
  std::vector<OmegaString> out;
  for (auto it = nodes_.upper_bound(node); it != nodes_.end() && node.is_prefix_of(*it); ++it) {
    if (it->size() == node.size() + 1) out.push_back(*it);
  }
  return out;
}

std::vector<OmegaString> WitnessTree::leaves() const {
  std::vector<OmegaString> out;
  for (const auto& n : nodes_) {
    if (stem_.is_prefix_of(n) && is_leaf(n)) out.push_back(n);
  }
  return out;
}

bool WitnessTree::prefix_closed() const {
  for (const auto& n : nodes_) {
    if (!n.empty() && !contains(n.prefix(n.size() - 1))) return false;
  }
  return true;
}

namespace {

// Memoized backward induction over the capped grid.
class BigSearch {
 public:
  BigSearch(const Membership& member, const GrowthFn& g, Caps caps)
      : member_(member), g_(g), caps_(caps) {}

  bool big(const OmegaString& node) {
    if (auto it = memo_.find(node); it != memo_.end()) return it->second;
    const bool result = compute(node);
    memo_.emplace(node, result);
    return result;
  }

  std::size_t needed(std::size_t depth) const {
    const Natural need = g_(depth);
    if (need <= 1) return 1;
    if (need > caps_.width_cap) return caps_.width_cap + 1;
    return static_cast<std::size_t>(need);
  }

  bool is_member(const OmegaString& node) {
    if (auto it = member_memo_.find(node); it != member_memo_.end()) return it->second;
    const bool in = member_(node);
    member_memo_.emplace(node, in);
    return in;
  }

  void build(const OmegaString& node, WitnessTree& tree) {
    tree.add_path(node);
    if (is_member(node)) return;
    const std::size_t need = needed(node.size());
    std::size_t taken = 0;
    for (std::size_t v = 0; v < caps_.width_cap && taken < need; ++v) {
      OmegaString c = node.child(Natural(v));
      if (big(c)) {
        build(c, tree);
        ++taken;
      }
    }
  }

 private:
  bool compute(const OmegaString& node) {
    if (is_member(node)) return true;
    if (node.size() >= caps_.depth_cap) return false;
    const std::size_t need = needed(node.size());
    if (need > caps_.width_cap) return false;
    std::size_t count = 0;
    for (std::size_t v = 0; v < caps_.width_cap; ++v) {
      if (count + (caps_.width_cap - v) < need) return false;
      if (big(node.child(Natural(v))) && ++count >= need) return true;
    }
    return false;
  }

  const Membership& member_;
  const GrowthFn& g_;
  Caps caps_;
  std::map<OmegaString, bool> memo_;
  std::map<OmegaString, bool> member_memo_;
};

Membership as_membership(const StringSet& b) {
  return [&b](const OmegaString& x) { return b.count(x) != 0; };
}

}  // namespace

std::optional<WitnessTree> is_big_bounded(const Membership& member, const OmegaString& sigma,
                                          const GrowthFn& g, Caps caps) {
  if (caps.depth_cap < sigma.size()) {
    throw std::invalid_argument("is_big_bounded: depth_cap " + std::to_string(caps.depth_cap) +
                                " is below |sigma| = " + std::to_string(sigma.size()));
  }
  BigSearch search(member, g, caps);
  if (!search.big(sigma)) return std::nullopt;
  WitnessTree tree(sigma);
  search.build(sigma, tree);
  return tree;
}

std::optional<WitnessTree> is_big_bounded(const StringSet& b, const OmegaString& sigma,
                                          const GrowthFn& g, Caps caps) {
  return is_big_bounded(as_membership(b), sigma, g, caps);
}

bool verify_witness(const WitnessTree& tree, const Membership& member, const GrowthFn& g) {
  const OmegaString& stem = tree.stem();
  if (!tree.contains(stem) || !tree.prefix_closed()) return false;
  for (const auto& node : tree.nodes()) {
    if (!node.comparable_with(stem)) return false;
    if (!stem.is_prefix_of(node)) continue;
    if (tree.is_leaf(node)) {
      if (!member(node)) return false;
    } else if (Natural(tree.children(node).size()) < g(node.size())) {
      return false;
    }
  }
  return true;
}

bool verify_witness(const WitnessTree& tree, const StringSet& b, const GrowthFn& g) {
  return verify_witness(tree, as_membership(b), g);
}

StringSet closure(const StringSet& b, const GrowthFn& g, Caps caps) {
  const Membership member = as_membership(b);
  BigSearch search(member, g, caps);
  StringSet out;
  for_each_grid_node(OmegaString{}, caps, [&](const OmegaString& node) {
    if (search.big(node)) out.insert(node);
  });
  return out;
}

WalkResult random_walk(const GrowthFn& h_eff, const EnumerableSet& avoid, std::size_t depth,
                       const std::vector<Restriction>& restrictions, Rng& rng, Stage stage) {
  WalkResult result;
  OmegaString& path = result.path;
  auto record_hit = [&] {
    if (!result.hit_depth && avoid.contains(path, stage)) {
      result.hit_depth = path.size();
      result.hit_set = true;
    }
  };
  record_hit();

  const Restriction* active = nullptr;
  std::size_t span_begin = 0;
  std::vector<Natural> span_bounds;
  auto close_span = [&] {
    if (span_bounds.empty()) {
      active = nullptr;
      return;
    }
    const std::size_t begin = span_begin;
    result.restrictions_log.push_back(RestrictionSpan{
        begin, begin + span_bounds.size(),
        GrowthFn(GrowthFn::Kind::kTable, "restriction",
                 [begin, v = span_bounds](std::size_t i) { return v.at(i - begin); },
                 begin + span_bounds.size())});
    span_bounds.clear();
    active = nullptr;
  };

  while (path.size() < depth) {
    if (!active) {
      for (const auto& r : restrictions) {
        if (r.trigger_depth == path.size()) {
          if (!r.tree.contains(path)) {
            throw WalkFault("restriction triggered at depth " + std::to_string(path.size()) +
                            " does not contain the current node " + path.to_string());
          }
          active = &r;
          span_begin = path.size();
          break;
        }
      }
    }
    if (active) {
      const auto kids = active->tree.children(path);
      if (kids.empty()) {
        close_span();
        continue;
      }
      span_bounds.emplace_back(kids.size());
      path = kids[rng.below(static_cast<std::uint64_t>(kids.size()))];
    } else {
      const Natural bound = h_eff(path.size());
      if (bound < 1) {
        throw std::invalid_argument("random_walk: h_eff(" + std::to_string(path.size()) +
                                    ") must be at least 1");
      }
      path.push_back(rng.below(bound));
    }
    record_hit();
  }
  if (active) close_span();
  return result;
}

Rational avoidance_lower_bound(const GrowthFn& g, const GrowthFn& h, std::size_t depth) {
  Rational product = 1;
  for (std::size_t i = 0; i < depth; ++i) {
    const Natural gi = g(i);
    const Natural hi = h(i);
    if (hi <= 0) throw std::invalid_argument("avoidance_lower_bound: h must be positive");
    if (gi > hi) {
      throw std::invalid_argument("avoidance_lower_bound: g(" + std::to_string(i) +
                                  ") exceeds h(" + std::to_string(i) + ")");
    }
    product *= Rational(hi - gi, hi);
  }
  return product;
}

namespace {

Rational hit_below(const GrowthFn& h_eff, const Membership& member, std::size_t depth,
                   OmegaString& node) {
  if (member(node)) return 1;
  if (node.size() == depth) return 0;
  const Natural width = h_eff(node.size());
  Rational total = 0;
  for (Natural v = 0; v < width; ++v) {
    node.push_back(v);
    total += hit_below(h_eff, member, depth, node);
    node.pop_back();
  }
  return total / width;
}

}  // namespace

Rational exact_hit_probability(const GrowthFn& h_eff, const Membership& member,
                               std::size_t depth) {
  OmegaString node;
  return hit_below(h_eff, member, depth, node);
}

}  // namespace bushy
