#include <gtest/gtest.h>

#include <map>
#include <stdexcept>

#include "bushy/growth_family.hpp"

namespace bushy {
namespace {

// Literal recurrence: g_0(n) = 2^{n+m}; g_k(i) = 1 below k and
// g_{k-1}(i) * 2^{g_{k-1}(k-1) + i + m} otherwise.
class ExactOracle {
 public:
  explicit ExactOracle(unsigned m) : m_(m) {}
  Natural g(std::size_t k, std::size_t i) {
    const auto key = std::make_pair(k, i);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Natural value;
    if (k == 0) {
      value = Natural(1) << static_cast<unsigned>(i + m_);
    } else if (i < k) {
      value = 1;
    } else {
      const Natural shift = g(k - 1, k - 1) + i + m_;
      value = g(k - 1, i) * (Natural(1) << static_cast<unsigned>(shift));
    }
    memo_[key] = value;
    return value;
  }

 private:
  unsigned m_;
  std::map<std::pair<std::size_t, std::size_t>, Natural> memo_;
};

FamilyOptions exact(unsigned m, std::size_t k_max) {
  FamilyOptions o;
  o.m = m;
  o.mode = FamilyMode::kExact;
  o.k_max = k_max;
  return o;
}

TEST(GrowthFamily, ExactSmallValues) {
  const auto family = GrowthFamily::make(exact(3, 2));
  EXPECT_EQ(family.g(0, 0), 8);
  EXPECT_EQ(family.g(0, 1), 16);
  EXPECT_EQ(family.g(1, 1), 65536);
  EXPECT_EQ(family.h(0), 8);
  EXPECT_EQ(family.h(2), pow2(65559));
  EXPECT_EQ(family.g(2, 1), 1);
}

TEST(GrowthFamily, ExactMatchesLiteralRecurrence) {
  for (unsigned m : {0u, 1u, 3u}) {
    const auto family = GrowthFamily::make(exact(m, 2));
    ExactOracle oracle(m);
    for (std::size_t k = 0; k <= 2; ++k) {
      for (std::size_t i = 0; i <= 6; ++i) {
        EXPECT_EQ(family.g(k, i), oracle.g(k, i)) << "m=" << m << " k=" << k << " i=" << i;
      }
    }
  }
}

TEST(GrowthFamily, ExactAuditsHold) {
  const auto family = GrowthFamily::make(exact(3, 2));
  const auto audit = audit_family(family, 6);
  EXPECT_TRUE(audit.ok()) << (audit.failures.empty() ? "" : audit.failures.front());
}

TEST(GrowthFamily, HDominanceFailsOnlyOnTheDiagonal) {
  const auto family = GrowthFamily::make(exact(3, 2));
  for (std::size_t i = 0; i <= 2; ++i) {
    EXPECT_LT(family.h(i), pow2(i + 3) * family.g(i, i));
  }
}

TEST(GrowthFamily, ScaledDefaultsAndAudit) {
  FamilyOptions o;
  o.m = 3;
  o.k_max = 30;
  const auto family = GrowthFamily::make(o);
  EXPECT_EQ(family.theta(1), 1);
  EXPECT_EQ(family.theta(7), 7);
  // e_k(i) = (i + m) + sum_{k' <= k} (k' + i + m).
  for (std::size_t k = 0; k <= 5; ++k) {
    for (std::size_t i = k; i <= 8; ++i) {
      std::uint64_t e = i + 3;
      for (std::size_t kk = 1; kk <= k; ++kk) e += kk + i + 3;
      EXPECT_EQ(family.g(k, i), pow2(e));
    }
  }
  EXPECT_TRUE(audit_family(family, 32).ok());
}

TEST(GrowthFamily, ScaledRejectsNegativeBoost) {
  FamilyOptions o;
  o.k_max = 5;
  o.boost = {0, 0, -1};
  EXPECT_THROW(GrowthFamily::make(o), std::invalid_argument);
}

TEST(GrowthFamily, ScaledRejectsZeroThreshold) {
  FamilyOptions o;
  o.k_max = 5;
  o.scaled_threshold = {0, 4, 0};
  EXPECT_THROW(GrowthFamily::make(o), std::invalid_argument);
}

TEST(GrowthFamily, ExactRejectsScaledParameters) {
  auto o = exact(3, 2);
  o.boost = {0, 1};
  EXPECT_THROW(GrowthFamily::make(o), std::invalid_argument);
}

TEST(GrowthFamily, RestrictionFunctionDividesByTheta) {
  FamilyOptions o;
  o.m = 0;
  o.k_max = 6;
  const auto family = GrowthFamily::make(o);
  const auto r1 = family.restriction_fn(1);
  // g_1(1) = 2^{1 + 1 + 1} and theta(1) = 1.
  EXPECT_EQ(family.g(1, 1), 8);
  EXPECT_EQ(r1(1), 4);
  EXPECT_EQ(r1(2), family.g(1, 2) / 2);
}

TEST(GrowthFamily, VariantAppliesH0) {
  FamilyOptions o;
  o.m = 1;
  o.k_max = 4;
  o.h0 = GrowthFn::table({0, 3, 5, 7, 9, 11, 13}, "h0");
  const auto family = GrowthFamily::make(o);
  EXPECT_EQ(family.theta(1), 3);
  EXPECT_EQ(family.theta(2), 5);
  EXPECT_EQ(family.exponent(1, 1), (1 + 1) + (3 + 1 + 1));
  EXPECT_TRUE(audit_family(family, 6).ok());
}

TEST(GrowthFamily, ExactVariantFromH0) {
  auto o = exact(0, 1);
  o.h0 = GrowthFn::constant(2);
  const auto family = GrowthFamily::make(o);
  // theta(1) = h0(h(0)) = 2; g_1(1) = 2^{1} * 2^{2 + 1}.
  EXPECT_EQ(family.g(1, 1), 16);
}

TEST(Threshold, ExactEventuallyDecreasing) {
  const auto family = GrowthFamily::make(exact(3, 2));
  const Natural t1 = requirement_threshold(1, family, 40, 5);
  const Natural t2 = requirement_threshold(2, family, 40, 5);
  const Natural t3 = requirement_threshold(3, family, 40, 5);
  EXPECT_EQ(t1, 2 * 4 + 40 - 8 + 5);
  EXPECT_EQ(t2, 2 * (4 + 17) + 40 - 65536 + 5);
  EXPECT_LT(t3, t2);
  EXPECT_LT(t2, t1);
}

TEST(Threshold, AllowedStageMonotoneInD) {
  const auto family = GrowthFamily::make(exact(3, 2));
  std::size_t previous = 0;
  for (std::int64_t d : {0, 10, 1000, 65000, 70000}) {
    const auto k = allowed_stage(d, family, 40, 5, 3);
    ASSERT_TRUE(k.has_value()) << d;
    EXPECT_GE(*k, previous);
    previous = *k;
  }
  EXPECT_EQ(*allowed_stage(0, family, 40, 5, 3), 2u);
  EXPECT_EQ(*allowed_stage(70000, family, 40, 5, 3), 3u);
}

TEST(Threshold, ScaledNeverNegative) {
  FamilyOptions o;
  o.k_max = 20;
  const auto family = GrowthFamily::make(o);
  EXPECT_FALSE(allowed_stage(0, family, 40, 5, 20).has_value());
}

}  // namespace
}  // namespace bushy
