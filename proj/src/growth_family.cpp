#include "bushy/growth_family.hpp"

#include <stdexcept>

namespace bushy {

namespace {

constexpr unsigned kMaxShift = 1u << 27;

}  // namespace

Natural GrowthFamily::pow2_big(const Natural& exponent) {
  if (exponent < 0 || exponent > kMaxShift) {
    throw std::domain_error("2^" + exponent.str().substr(0, 40) +
                            " is beyond the representable range");
  }
  return pow2(static_cast<std::uint64_t>(exponent));
}

std::int64_t GrowthFamily::boost(std::size_t k) const {
  return k < options_.boost.size() ? options_.boost[k] : 0;
}

GrowthFamily GrowthFamily::make(const FamilyOptions& options) {
  if (options.mode == FamilyMode::kExact) {
    if (!options.scaled_threshold.empty() || !options.boost.empty()) {
      throw std::invalid_argument("exact family: scaled_threshold and boost are scaled-only");
    }
  }
  for (std::size_t k = 0; k < options.boost.size(); ++k) {
    if (options.boost[k] < 0) {
      throw std::invalid_argument("scaled family: boost(" + std::to_string(k) +
                                  ") < 0 breaks restriction-safety");
    }
  }
  for (std::size_t k = 1; k < options.scaled_threshold.size(); ++k) {
    if (options.scaled_threshold[k] == 0) {
      throw std::invalid_argument("scaled family: threshold(" + std::to_string(k) +
                                  ") must be at least 1");
    }
  }
  GrowthFamily family(options);
  family.build();
  const auto audit = audit_family(family, family.k_max());
  if (!audit.ok()) {
    throw std::invalid_argument("growth family fails its audit: " + audit.failures.front());
  }
  return family;
}

void GrowthFamily::build() {
  const std::size_t n = options_.k_max + 2;
  theta_.assign(n, 0);
  sum_.assign(n, 0);
  for (std::size_t k = 1; k < n; ++k) {
    Natural base;
    if (options_.mode == FamilyMode::kExact) {
      base = h(k - 1);
    } else {
      base = k < options_.scaled_threshold.size() && options_.scaled_threshold[k] != 0
                 ? Natural(options_.scaled_threshold[k])
                 : Natural(k);
    }
    if (options_.h0) {
      if (base > std::numeric_limits<std::size_t>::max() / 2) {
        throw std::domain_error("h0 applied to an argument beyond the representable range");
      }
      base = (*options_.h0)(static_cast<std::size_t>(base));
    }
    theta_[k] = base;
    sum_[k] = sum_[k - 1] + base + options_.m + boost(k);
  }
}

Natural GrowthFamily::theta(std::size_t k) const {
  if (k == 0 || k >= theta_.size()) {
    throw std::out_of_range("theta(" + std::to_string(k) + ") outside [1, k_max + 1]");
  }
  return theta_[k];
}

Natural GrowthFamily::exponent(std::size_t k, std::size_t i) const {
  if (k > options_.k_max) {
    throw std::out_of_range("g_" + std::to_string(k) + " beyond k_max " +
                            std::to_string(options_.k_max));
  }
  if (i < k) return 0;
  // (i + m) from g_0 plus, for each level k' <= k, theta(k') + i + m + boost(k').
  return Natural(i + options_.m) + sum_[k] + Natural(k) * i;
}

Natural GrowthFamily::h(std::size_t k) const { return g(k, k); }

GrowthFn GrowthFamily::g_fn(std::size_t k) const {
  const GrowthFamily self = *this;
  return GrowthFn(GrowthFn::Kind::kClosedForm, "g_" + std::to_string(k),
                  [self, k](std::size_t i) { return self.g(k, i); });
}

GrowthFn GrowthFamily::restriction_fn(std::size_t k) const {
  const GrowthFamily self = *this;
  const Natural t = theta(k);
  return GrowthFn(GrowthFn::Kind::kScaled, "g_" + std::to_string(k) + "/2^theta",
                  [self, k, t](std::size_t i) {
                    const Natural e = self.exponent(k, i) - t;
                    return e < 0 ? Natural(0) : pow2_big(e);
                  });
}

GrowthFn GrowthFamily::h_fn() const {
  const GrowthFamily self = *this;
  return GrowthFn(
      GrowthFn::Kind::kClosedForm, "h", [self](std::size_t k) { return self.h(k); },
      options_.k_max + 1);
}

FamilyAudit audit_family(const GrowthFamily& family, std::size_t i_max) {
  FamilyAudit audit;
  const std::size_t k_max = family.k_max();
  const unsigned m = family.m();
  auto fail = [&](bool& flag, std::string what) {
    flag = false;
    audit.failures.push_back(std::move(what));
  };
  for (std::size_t i = 0; i <= i_max; ++i) {
    const Natural floor = pow2(i + m);
    for (std::size_t k = 1; k <= std::min(i, k_max); ++k) {
      const Natural restricted = family.g(k, i) >> static_cast<unsigned>(family.theta(k));
      for (std::size_t j = 0; j < k; ++j) {
        if (restricted < floor * family.g(j, i)) {
          fail(audit.restriction_safety, "restriction-safety at j=" + std::to_string(j) +
                                             " k=" + std::to_string(k) +
                                             " i=" + std::to_string(i));
        }
      }
      if (restricted < floor) {
        fail(audit.draw_floor,
             "draw floor for g_" + std::to_string(k) + " at n=" + std::to_string(i));
      }
    }
    if (i <= k_max) {
      const Natural hi = family.h(i);
      if (hi < floor) fail(audit.draw_floor, "draw floor for h at n=" + std::to_string(i));
      for (std::size_t k = 0; k < i; ++k) {
        if (hi < floor * family.g(k, i)) {
          fail(audit.h_dominance,
               "h dominance at k=" + std::to_string(k) + " i=" + std::to_string(i));
        }
      }
    }
  }
  return audit;
}

Natural requirement_threshold(std::size_t k, const GrowthFamily& family,
                              std::uint64_t k_gamma_bound, std::uint64_t c2) {
  if (k == 0) throw std::invalid_argument("requirement_threshold: k must be at least 1");
  Natural total = 0;
  for (std::size_t i = 0; i + 1 <= k; ++i) total += bit_length(family.h(i));
  return 2 * total + Natural(k_gamma_bound) - family.theta(k) + Natural(c2);
}

std::optional<std::size_t> allowed_stage(std::int64_t d, const GrowthFamily& family,
                                         std::uint64_t k_gamma_bound, std::uint64_t c2,
                                         std::size_t k_limit) {
  for (std::size_t k = 1; k <= k_limit; ++k) {
    if (requirement_threshold(k, family, k_gamma_bound, c2) < -Natural(d)) return k;
  }
  return std::nullopt;
}

}  // namespace bushy
