#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include "bushy/natural.hpp"

namespace bushy {

/// A finite sequence of naturals: a node of the full tree omega^{<omega}.
///
/// Ordering is lexicographic with a proper prefix sorting before its
/// extensions, so std::set<OmegaString> iterates in the canonical search order.
class OmegaString {
 public:
  OmegaString() = default;
  OmegaString(std::initializer_list<Natural> values) : values_(values) {}
  explicit OmegaString(std::vector<Natural> values) : values_(std::move(values)) {}

  static OmegaString from_u64(const std::vector<std::uint64_t>& values) {
    OmegaString out;
    for (auto v : values) out.values_.emplace_back(v);
    return out;
  }

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const Natural& operator[](std::size_t i) const { return values_[i]; }
  const Natural& back() const { return values_.back(); }
  const std::vector<Natural>& values() const { return values_; }

  void push_back(Natural v) { values_.push_back(std::move(v)); }
  void pop_back() { values_.pop_back(); }

  /// This string with one more value appended.
  OmegaString child(Natural v) const {
    OmegaString out = *this;
    out.values_.push_back(std::move(v));
    return out;
  }

  /// The first n values (the whole string if n >= size()).
  OmegaString prefix(std::size_t n) const {
    if (n >= values_.size()) return *this;
    return OmegaString(std::vector<Natural>(values_.begin(), values_.begin() + n));
  }

  /// sigma.is_prefix_of(tau) iff sigma is an initial segment of tau.
  bool is_prefix_of(const OmegaString& other) const {
    if (values_.size() > other.values_.size()) return false;
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (values_[i] != other.values_[i]) return false;
    }
    return true;
  }

  bool comparable_with(const OmegaString& other) const {
    return is_prefix_of(other) || other.is_prefix_of(*this);
  }

  friend bool operator==(const OmegaString&, const OmegaString&) = default;
  friend std::strong_ordering operator<=>(const OmegaString& a, const OmegaString& b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (a.values_[i] < b.values_[i]) return std::strong_ordering::less;
      if (b.values_[i] < a.values_[i]) return std::strong_ordering::greater;
    }
    return a.size() <=> b.size();
  }

  /// "<3,1,4>", with "λ" for the empty string.
  std::string to_string() const {
    if (values_.empty()) return "λ";
    std::string out = "<";
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (i) out += ",";
      out += values_[i].str();
    }
    return out + ">";
  }

 private:
  std::vector<Natural> values_;
};

/// Binary output of a functional, one '0' or '1' character per bit.
using BitString = std::string;

inline bool is_bit_prefix(const BitString& a, const BitString& b) {
  return a.size() <= b.size() && b.compare(0, a.size(), a) == 0;
}

}  // namespace bushy
