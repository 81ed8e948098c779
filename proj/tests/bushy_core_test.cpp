#include "bushy/bushy_core.hpp"

#include <gtest/gtest.h>

#include <functional>

namespace bushy {
namespace {

OmegaString S(std::initializer_list<std::uint64_t> v) {
  return OmegaString::from_u64(std::vector<std::uint64_t>(v));
}

// Independent oracle: tries every non-empty subset of children instead of counting.
bool big_by_subsets(const StringSet& b, const OmegaString& node, std::size_t g, Caps caps) {
  if (b.count(node)) return true;
  if (node.size() >= caps.depth_cap) return false;
  const std::size_t w = caps.width_cap;
  for (std::uint32_t mask = 1; mask < (1u << w); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) < g) continue;
    bool all = true;
    for (std::size_t v = 0; v < w && all; ++v) {
      if (mask & (1u << v)) all = big_by_subsets(b, node.child(Natural(v)), g, caps);
    }
    if (all) return true;
  }
  return false;
}

TEST(BushyCore, MemberStemGivesSingleNodeWitness) {
  const StringSet b = {S({3})};
  auto w = is_big_bounded(b, S({3}), GrowthFn::constant(5), Caps{3, 2});
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->leaves(), std::vector<OmegaString>{S({3})});
  EXPECT_TRUE(verify_witness(*w, b, GrowthFn::constant(5)));
}

TEST(BushyCore, EmptySetIsSmall) {
  EXPECT_FALSE(is_big_bounded(StringSet{}, OmegaString{}, GrowthFn::constant(2), Caps{4, 4}));
}

TEST(BushyCore, FullBinaryDepthTwo) {
  const StringSet b = {S({0, 0}), S({0, 1}), S({1, 0}), S({1, 1})};
  const Caps caps{2, 3};
  auto w = is_big_bounded(b, OmegaString{}, GrowthFn::constant(2), caps);
  ASSERT_TRUE(w.has_value());
  const StringSet expected = {OmegaString{}, S({0}), S({1}), S({0, 0}), S({0, 1}), S({1, 0}),
                              S({1, 1})};
  EXPECT_EQ(w->nodes(), expected);
  EXPECT_TRUE(big_by_subsets(b, OmegaString{}, 2, caps));
  EXPECT_FALSE(verify_witness(*w, b, GrowthFn::constant(3)));
}

TEST(BushyCore, RejectsDepthCapBelowStem) {
  EXPECT_THROW(is_big_bounded(StringSet{}, S({1, 2}), GrowthFn::constant(1), Caps{1, 2}),
               std::invalid_argument);
}

TEST(BushyCore, VerifyRejectsMissingLeafAndNonComparableNode) {
  WitnessTree t(S({0}));
  t.add_path(S({0, 1}));
  EXPECT_FALSE(verify_witness(t, StringSet{S({0, 0})}, GrowthFn::constant(1)));
  EXPECT_TRUE(verify_witness(t, StringSet{S({0, 1})}, GrowthFn::constant(1)));
  t.add_path(S({1}));
  EXPECT_FALSE(verify_witness(t, StringSet{S({0, 1}), S({1})}, GrowthFn::constant(1)));
}

TEST(BushyCore, AgreesWithSubsetOracleAndRoundTrips) {
  Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Caps caps{1 + rng.below(std::uint64_t{3}), 1 + rng.below(std::uint64_t{3})};
    const std::size_t g = rng.below(std::uint64_t{4});
    StringSet b;
    for_each_grid_node(OmegaString{}, caps, [&](const OmegaString& x) {
      if (rng.below(std::uint64_t{4}) == 0) b.insert(x);
    });
    const auto w = is_big_bounded(b, OmegaString{}, GrowthFn::constant(g), caps);
    EXPECT_EQ(w.has_value(), big_by_subsets(b, OmegaString{}, g, caps));
    if (w) EXPECT_TRUE(verify_witness(*w, b, GrowthFn::constant(g)));
  }
}

TEST(BushyCore, ClosureExamples) {
  const Caps caps{2, 2};
  const StringSet b = {S({0, 0}), S({0, 1}), S({1, 0}), S({1, 1})};
  const StringSet c = closure(b, GrowthFn::constant(2), caps);
  for (const auto& x : {OmegaString{}, S({0}), S({1})}) EXPECT_TRUE(c.count(x));
  for (const auto& x : b) EXPECT_TRUE(c.count(x));

  const StringSet single = {S({0, 0})};
  EXPECT_EQ(closure(single, GrowthFn::constant(2), caps), single);
}

TEST(BushyCore, ClosureIdempotentOnRandomSets) {
  Rng rng(5);
  const Caps caps{3, 3};
  for (int trial = 0; trial < 20; ++trial) {
    StringSet b;
    while (b.size() < 10) {
      OmegaString x;
      const auto len = rng.below(std::uint64_t{4});
      for (std::uint64_t i = 0; i < len; ++i) x.push_back(rng.below(std::uint64_t{3}));
      b.insert(x);
    }
    const auto c = closure(b, GrowthFn::constant(2), caps);
    EXPECT_EQ(closure(c, GrowthFn::constant(2), caps), c);
  }
}

TEST(BushyCore, WalkAvoidsEmptySet) {
  Rng rng(1);
  FiniteEnumeration empty;
  for (int i = 0; i < 100; ++i) {
    auto r = random_walk(GrowthFn::pow2_shifted(1), empty, 5, {}, rng);
    EXPECT_FALSE(r.hit_set);
    EXPECT_EQ(r.path.size(), 5u);
  }
}

TEST(BushyCore, ForcedWalkHits) {
  Rng rng(2);
  FiniteEnumeration avoid(StringSet{S({0})});
  auto r = random_walk(GrowthFn::constant(1), avoid, 4, {}, rng);
  EXPECT_TRUE(r.hit_set);
  EXPECT_EQ(r.hit_depth, std::optional<std::size_t>(1));
}

TEST(BushyCore, RestrictedWalkFollowsTree) {
  WitnessTree t(S({}));
  t.add_path(S({4, 2}));
  t.add_path(S({4, 5}));
  FiniteEnumeration none;
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    auto r = random_walk(GrowthFn::constant(1), none, 3, {Restriction{0, t}}, rng);
    EXPECT_EQ(r.path[0], 4);
    EXPECT_TRUE(r.path[1] == 2 || r.path[1] == 5);
    EXPECT_EQ(r.path[2], 0);
    ASSERT_EQ(r.restrictions_log.size(), 1u);
    EXPECT_EQ(r.restrictions_log[0].begin, 0u);
    EXPECT_EQ(r.restrictions_log[0].end, 2u);
    EXPECT_EQ(r.restrictions_log[0].bound(1), 2);
  }
}

TEST(BushyCore, RestrictionMissingNodeFaults) {
  WitnessTree t(S({1}));
  FiniteEnumeration none;
  Rng rng(3);
  EXPECT_THROW(random_walk(GrowthFn::constant(1), none, 3, {Restriction{1, t}}, rng), WalkFault);
}

TEST(BushyCore, AvoidanceLowerBound) {
  const GrowthFn h = GrowthFn::pow2_shifted(4);
  EXPECT_EQ(avoidance_lower_bound(GrowthFn::constant(0), h, 5), Rational(1));
  EXPECT_EQ(avoidance_lower_bound(GrowthFn::constant(2), h, 3), Rational(3255, 4096));
  EXPECT_EQ(avoidance_lower_bound(h, h, 1), Rational(0));
  EXPECT_THROW(avoidance_lower_bound(GrowthFn::constant(64), h, 3), std::invalid_argument);
}

TEST(BushyCore, ExactHitProbabilityOnClosedSmallSet) {
  // One member child under every zero-free node: closed and 2-small.
  const std::size_t depth = 3;
  const GrowthFn h = GrowthFn::pow2_shifted(4);
  const Caps caps{depth, 64};
  auto member = [](const OmegaString& x) {
    if (x.empty() || x.back() != 0) return false;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (x[i] == 0) return false;
    }
    return true;
  };
  EXPECT_FALSE(is_big_bounded(member, OmegaString{}, GrowthFn::constant(2), caps));
  const Rational hit = exact_hit_probability(h, member, depth);
  EXPECT_EQ(1 - hit, Rational(15, 16) * Rational(31, 32) * Rational(63, 64));
  EXPECT_LE(hit, 1 - avoidance_lower_bound(GrowthFn::constant(2), h, depth));
}

}  // namespace
}  // namespace bushy
