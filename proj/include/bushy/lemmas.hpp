#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "bushy/bushy_core.hpp"

namespace bushy {

/// Existence of a witness tree by trying every child subset of size
/// >= max(g, 1) at every node; memoized per node, no counting shortcut.
bool exhaustive_big(const StringSet& b, const OmegaString& sigma, const GrowthFn& g, Caps caps);

struct LemmaCheck {
  std::string name;
  std::size_t checked = 0;
  /// Instances where the premise did not hold (nothing to check).
  std::size_t vacuous = 0;
  std::vector<std::string> failures;
};

struct LemmaReport {
  std::size_t instances = 0;
  std::vector<LemmaCheck> checks;  // agreement, concatenation, additivity, closure
  bool ok() const;
};

struct LemmaSuiteConfig {
  std::size_t instances = 1000;
  std::uint64_t seed = 0;
  std::size_t max_width = 3;
  std::size_t max_depth = 4;
};

/// Randomized instances inside the capped grid; instance i uses
/// derive_seed(seed, i).
LemmaReport run_lemma_suite(const LemmaSuiteConfig& config);

}  // namespace bushy
