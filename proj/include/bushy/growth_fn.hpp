#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "bushy/natural.hpp"

namespace bushy {

/// A bound function depth -> natural, total up to a declared horizon.
///
/// Instances are cheap to copy (the evaluator is shared) and immutable.
class GrowthFn {
 public:
  enum class Kind { kClosedForm, kTable, kSumOf, kScaled };

  using Evaluator = std::function<Natural(std::size_t)>;
  static constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

  GrowthFn(Kind kind, std::string name, Evaluator eval, std::size_t horizon = kUnbounded);

  /// Constant function c.
  static GrowthFn constant(const Natural& c);
  /// i -> 2^{i + offset}.
  static GrowthFn pow2_shifted(std::uint64_t offset);
  /// Tabulated values; the horizon is the table size.
  static GrowthFn table(std::vector<Natural> values, std::string name = "table");
  /// Pointwise sum of the given functions.
  static GrowthFn sum_of(const std::vector<GrowthFn>& terms);
  /// i -> 2^{i + offset} * f(i).
  static GrowthFn scaled_by_pow2(const GrowthFn& f, std::uint64_t offset);
  /// i -> 2^{exponent} * f(i) (exponent independent of i).
  static GrowthFn times_pow2(const GrowthFn& f, std::uint64_t exponent);
  /// i -> floor(f(i) / 2^{exponent}).
  static GrowthFn shifted_right(const GrowthFn& f, std::uint64_t exponent);

  Natural operator()(std::size_t depth) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  std::size_t horizon() const { return horizon_; }

 private:
  Kind kind_;
  std::string name_;
  std::shared_ptr<const Evaluator> eval_;
  std::size_t horizon_;
};

GrowthFn operator+(const GrowthFn& a, const GrowthFn& b);

}  // namespace bushy
