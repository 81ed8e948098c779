#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "bushy/omega_string.hpp"

namespace bushy {

using Stage = std::uint64_t;
using StringSet = std::set<OmegaString>;
/// Decidable membership at a fixed stage.
using Membership = std::function<bool(const OmegaString&)>;

/// Finite search window of the tree: strings of length <= depth_cap whose
/// values past the stem are all < width_cap.
struct Caps {
  std::size_t depth_cap = 0;
  std::size_t width_cap = 0;
};

/// A stage-indexed monotone enumeration of strings (a c.e. set at finite scale).
/// Implementations must guarantee contains(x, s) implies contains(x, s') for s <= s'.
class EnumerableSet {
 public:
  virtual ~EnumerableSet() = default;
  virtual bool contains(const OmegaString& x, Stage stage) const = 0;

  Membership at(Stage stage) const {
    return [this, stage](const OmegaString& x) { return contains(x, stage); };
  }
};

/// Finitely many strings, each with the stage at which it is enumerated.
class FiniteEnumeration final : public EnumerableSet {
 public:
  FiniteEnumeration() = default;
  /// Every member enumerated at stage 0.
  explicit FiniteEnumeration(const StringSet& members);

  void add(const OmegaString& x, Stage stage = 0);
  bool contains(const OmegaString& x, Stage stage) const override;
  /// The members enumerated by `stage`.
  StringSet members(Stage stage) const;

 private:
  std::map<OmegaString, Stage> entries_;
};

/// Membership given by a predicate; the caller promises stage-monotonicity.
class PredicateSet final : public EnumerableSet {
 public:
  using Predicate = std::function<bool(const OmegaString&, Stage)>;
  explicit PredicateSet(Predicate pred) : pred_(std::move(pred)) {}
  bool contains(const OmegaString& x, Stage stage) const override { return pred_(x, stage); }

 private:
  Predicate pred_;
};

/// Members of `set` at `stage` inside the capped grid above the empty string.
StringSet snapshot(const EnumerableSet& set, Stage stage, Caps caps);

/// Visits every node of the capped grid above `root` in lexicographic order.
void for_each_grid_node(const OmegaString& root, Caps caps,
                        const std::function<void(const OmegaString&)>& visit);

/// Length of the shortest prefix of `path` in `member`, if any.
std::optional<std::size_t> first_hit(const OmegaString& path, const Membership& member);

}  // namespace bushy
