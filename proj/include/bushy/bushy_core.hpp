#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bushy/enumerable_set.hpp"
#include "bushy/growth_fn.hpp"
#include "bushy/omega_string.hpp"
#include "bushy/random.hpp"

namespace bushy {

/// A finite prefix-closed tree certifying that a set is big above its stem.
/// Leaves are structural: a node is a leaf iff no node of the tree extends it.
class WitnessTree {
 public:
  WitnessTree() = default;
  /// The tree consisting of the stem and its prefixes.
  explicit WitnessTree(OmegaString stem);

  const OmegaString& stem() const { return stem_; }
  const StringSet& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// Adds `node` and all its prefixes.
  void add_path(const OmegaString& node);

  bool contains(const OmegaString& node) const { return nodes_.count(node) != 0; }
  bool is_leaf(const OmegaString& node) const;
  /// Immediate children of `node` in the tree, in lexicographic order.
  std::vector<OmegaString> children(const OmegaString& node) const;
  /// Leaves that extend the stem.
  std::vector<OmegaString> leaves() const;
  bool prefix_closed() const;

  friend bool operator==(const WitnessTree&, const WitnessTree&) = default;

 private:
  OmegaString stem_;
  StringSet nodes_;
};

/// Searches for a witness that `member` is g-big above `sigma` inside the capped
/// grid. Backward induction: a node is big if it is a member, or if at least
/// g(|node|) of its width-capped children are big. The witness keeps the
/// lexicographically least big children. nullopt means "g-small within caps".
std::optional<WitnessTree> is_big_bounded(const Membership& member, const OmegaString& sigma,
                                          const GrowthFn& g, Caps caps);
std::optional<WitnessTree> is_big_bounded(const StringSet& b, const OmegaString& sigma,
                                          const GrowthFn& g, Caps caps);

/// True iff the tree is prefix-closed, contains its stem, every node is comparable
/// with the stem, every leaf above the stem is a member, and every internal node
/// above the stem has at least g(|node|) children.
bool verify_witness(const WitnessTree& tree, const Membership& member, const GrowthFn& g);
bool verify_witness(const WitnessTree& tree, const StringSet& b, const GrowthFn& g);

/// All grid nodes above which `b` is g-big within caps.
StringSet closure(const StringSet& b, const GrowthFn& g, Caps caps);

/// Thrown when a walk is asked to follow a restriction tree that does not
/// contain the current node.
class WalkFault : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Restrict the walk to `tree` once it reaches depth `trigger_depth`.
struct Restriction {
  std::size_t trigger_depth = 0;
  WitnessTree tree;
};

/// Depths [begin, end) walked under a restriction; `bound` gives the number of
/// children the walk chose among at each of those depths.
struct RestrictionSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  GrowthFn bound;
};

struct WalkResult {
  OmegaString path;
  bool hit_set = false;
  std::optional<std::size_t> hit_depth;
  std::vector<RestrictionSpan> restrictions_log;
};

/// Downward random walk of length `depth`: value i is uniform in [0, h_eff(i))
/// except inside an active restriction, where the next node is uniform among
/// the current node's children in the restriction tree until a leaf is reached.
WalkResult random_walk(const GrowthFn& h_eff, const EnumerableSet& avoid, std::size_t depth,
                       const std::vector<Restriction>& restrictions, Rng& rng, Stage stage = 0);

/// prod_{i < depth} (1 - g(i)/h(i)), exactly.
Rational avoidance_lower_bound(const GrowthFn& g, const GrowthFn& h, std::size_t depth);

/// Exact probability that an unrestricted walk with bounds h_eff meets `member`
/// by depth `depth`, by backward induction over the whole walk tree.
Rational exact_hit_probability(const GrowthFn& h_eff, const Membership& member,
                               std::size_t depth);

}  // namespace bushy
