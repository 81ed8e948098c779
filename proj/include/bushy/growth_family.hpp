#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bushy/growth_fn.hpp"

namespace bushy {

enum class FamilyMode { kExact, kScaled };

struct FamilyOptions {
  unsigned m = 3;
  FamilyMode mode = FamilyMode::kScaled;
  /// Largest k for which g_k and h(k) are materialized.
  std::size_t k_max = 2;
  /// Optional h0; switches the output threshold to h0(base(k)).
  std::optional<GrowthFn> h0;
  /// Scaled mode: base output threshold for k >= 1 (index k); missing
  /// entries default to k.
  std::vector<std::uint64_t> scaled_threshold;
  /// Scaled mode: extra exponent added at level k (index k); must keep both
  /// inequalities, so negative values are rejected.
  std::vector<std::int64_t> boost;
};

/// The functions g_0, g_1, ... and h(k) = g_k(k).
///
/// Every g_k(i) is a power of two. With theta(k) the output threshold used at
/// level k (h(k-1) in exact mode, a table in scaled mode, passed through h0 in
/// the variant), the exponent is
///   e_0(i) = i + m,
///   e_k(i) = 0 for i < k, e_{k-1}(i) + theta(k) + i + m + boost(k) otherwise.
class GrowthFamily {
 public:
  /// Validates the options; throws std::invalid_argument naming the violated
  /// inequality or parameter.
  static GrowthFamily make(const FamilyOptions& options);

  const FamilyOptions& options() const { return options_; }
  unsigned m() const { return options_.m; }
  FamilyMode mode() const { return options_.mode; }
  std::size_t k_max() const { return options_.k_max; }

  /// log2 g_k(i).
  Natural exponent(std::size_t k, std::size_t i) const;
  Natural g(std::size_t k, std::size_t i) const { return pow2_big(exponent(k, i)); }
  Natural h(std::size_t k) const;
  /// The output threshold theta(k) for k >= 1: the length |rho| searched at level k.
  Natural theta(std::size_t k) const;

  GrowthFn g_fn(std::size_t k) const;
  /// i -> g_k(i) / 2^{theta(k)}: the bushiness of restriction trees at level k.
  GrowthFn restriction_fn(std::size_t k) const;
  /// h as a function, defined for k <= k_max.
  GrowthFn h_fn() const;

  static Natural pow2_big(const Natural& exponent);

 private:
  explicit GrowthFamily(FamilyOptions options) : options_(std::move(options)) {}
  void build();
  std::int64_t boost(std::size_t k) const;

  FamilyOptions options_;
  std::vector<Natural> theta_;  // index k (theta_[0] unused)
  std::vector<Natural> sum_;    // sum_[k] = sum_{k' <= k} (theta(k') + m + boost(k'))
};

struct FamilyAudit {
  bool restriction_safety = true;
  bool h_dominance = true;
  bool draw_floor = true;
  std::vector<std::string> failures;
  bool ok() const { return restriction_safety && h_dominance && draw_floor; }
};

/// Checks, for every index up to i_max:
///   g_k(i)/2^{theta(k)} >= 2^{i+m} g_j(i)   for j < k <= i, k <= k_max;
///   h(i) >= 2^{i+m} g_k(i)                  for k < i <= k_max;
///   h(n) >= 2^{n+m} and g_k(n)/2^{theta(k)} >= 2^{n+m} for k <= n.
FamilyAudit audit_family(const GrowthFamily& family, std::size_t i_max);

/// 2 sum_{i <= k-1} bitlen(h(i)) + K_gamma - theta(k) + c2, for k >= 1.
Natural requirement_threshold(std::size_t k, const GrowthFamily& family,
                              std::uint64_t k_gamma_bound, std::uint64_t c2);

/// First k in [1, k_limit] with requirement_threshold(k) < -d.
std::optional<std::size_t> allowed_stage(std::int64_t d, const GrowthFamily& family,
                                         std::uint64_t k_gamma_bound, std::uint64_t c2,
                                         std::size_t k_limit);

}  // namespace bushy
