#include "bushy/enumerable_set.hpp"

namespace bushy {

FiniteEnumeration::FiniteEnumeration(const StringSet& members) {
  for (const auto& m : members) entries_.emplace(m, 0);
}

void FiniteEnumeration::add(const OmegaString& x, Stage stage) {
  auto [it, inserted] = entries_.emplace(x, stage);
  if (!inserted && stage < it->second) it->second = stage;
}

bool FiniteEnumeration::contains(const OmegaString& x, Stage stage) const {
  auto it = entries_.find(x);
  return it != entries_.end() && it->second <= stage;
}

StringSet FiniteEnumeration::members(Stage stage) const {
  StringSet out;
  for (const auto& [x, s] : entries_) {
    if (s <= stage) out.insert(x);
  }
  return out;
}

void for_each_grid_node(const OmegaString& root, Caps caps,
                        const std::function<void(const OmegaString&)>& visit) {
  if (root.size() > caps.depth_cap) return;
  visit(root);
  if (root.size() == caps.depth_cap) return;
  OmegaString node = root;
  for (std::size_t v = 0; v < caps.width_cap; ++v) {
    node.push_back(Natural(v));
    for_each_grid_node(node, caps, visit);
    node.pop_back();
  }
}

StringSet snapshot(const EnumerableSet& set, Stage stage, Caps caps) {
  StringSet out;
  for_each_grid_node(OmegaString{}, caps, [&](const OmegaString& x) {
    if (set.contains(x, stage)) out.insert(x);
  });
  return out;
}

std::optional<std::size_t> first_hit(const OmegaString& path, const Membership& member) {
  for (std::size_t n = 0; n <= path.size(); ++n) {
    if (member(path.prefix(n))) return n;
  }
  return std::nullopt;
}

}  // namespace bushy
