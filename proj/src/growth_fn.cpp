#include "bushy/growth_fn.hpp"

#include <stdexcept>

namespace bushy {

GrowthFn::GrowthFn(Kind kind, std::string name, Evaluator eval, std::size_t horizon)
    : kind_(kind),
      name_(std::move(name)),
      eval_(std::make_shared<const Evaluator>(std::move(eval))),
      horizon_(horizon) {}

Natural GrowthFn::operator()(std::size_t depth) const {
  if (depth >= horizon_) {
    throw std::out_of_range("growth function '" + name_ + "' evaluated at depth " +
                            std::to_string(depth) + " beyond its horizon " +
                            std::to_string(horizon_));
  }
  return (*eval_)(depth);
}

GrowthFn GrowthFn::constant(const Natural& c) {
  return GrowthFn(Kind::kClosedForm, "const(" + c.str() + ")", [c](std::size_t) { return c; });
}

GrowthFn GrowthFn::pow2_shifted(std::uint64_t offset) {
  return GrowthFn(Kind::kClosedForm, "2^(i+" + std::to_string(offset) + ")",
                  [offset](std::size_t i) { return pow2(i + offset); });
}

GrowthFn GrowthFn::table(std::vector<Natural> values, std::string name) {
  const std::size_t n = values.size();
  return GrowthFn(
      Kind::kTable, std::move(name),
      [v = std::move(values)](std::size_t i) { return v.at(i); }, n);
}

GrowthFn GrowthFn::sum_of(const std::vector<GrowthFn>& terms) {
  std::size_t horizon = kUnbounded;
  std::string name;
  for (const auto& t : terms) {
    horizon = std::min(horizon, t.horizon());
    if (!name.empty()) name += "+";
    name += t.name();
  }
  if (name.empty()) name = "0";
  return GrowthFn(
      Kind::kSumOf, name,
      [terms](std::size_t i) {
        Natural total = 0;
        for (const auto& t : terms) total += t(i);
        return total;
      },
      horizon);
}

GrowthFn GrowthFn::scaled_by_pow2(const GrowthFn& f, std::uint64_t offset) {
  return GrowthFn(
      Kind::kScaled, "2^(i+" + std::to_string(offset) + ")*(" + f.name() + ")",
      [f, offset](std::size_t i) { return pow2(i + offset) * f(i); }, f.horizon());
}

GrowthFn GrowthFn::times_pow2(const GrowthFn& f, std::uint64_t exponent) {
  return GrowthFn(
      Kind::kScaled, "2^" + std::to_string(exponent) + "*(" + f.name() + ")",
      [f, exponent](std::size_t i) { return f(i) << static_cast<unsigned>(exponent); },
      f.horizon());
}

GrowthFn GrowthFn::shifted_right(const GrowthFn& f, std::uint64_t exponent) {
  return GrowthFn(
      Kind::kScaled, "(" + f.name() + ")/2^" + std::to_string(exponent),
      [f, exponent](std::size_t i) { return f(i) >> static_cast<unsigned>(exponent); },
      f.horizon());
}

GrowthFn operator+(const GrowthFn& a, const GrowthFn& b) { return GrowthFn::sum_of({a, b}); }

}  // namespace bushy
