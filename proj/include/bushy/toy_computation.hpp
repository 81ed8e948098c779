#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bushy/enumerable_set.hpp"
#include "bushy/toy_machine.hpp"

namespace bushy {

/// An indexed list of programs: phi_e is programs[e]. The optional oracle is
/// passed to every program that reads it.
class ToyEnumeration {
 public:
  ToyEnumeration() = default;
  explicit ToyEnumeration(std::vector<ToyProgram> programs,
                          std::optional<Oracle> oracle = std::nullopt)
      : programs_(std::move(programs)), oracle_(std::move(oracle)) {}

  /// The curated 64-program corpus with a 128-bit Thue-Morse oracle prefix.
  static ToyEnumeration shipped();
  /// One program per non-empty, non-comment line.
  static ToyEnumeration parse_corpus(std::string_view text);
  /// Every program of 1..max_len instructions over a small operand alphabet,
  /// ordered by length then opcode sequence.
  static ToyEnumeration canonical(std::size_t max_len);

  std::size_t size() const { return programs_.size(); }
  const ToyProgram& program(std::size_t e) const { return programs_.at(e); }
  const std::vector<ToyProgram>& programs() const { return programs_; }
  const std::optional<Oracle>& oracle() const { return oracle_; }
  void set_oracle(std::optional<Oracle> oracle) { oracle_ = std::move(oracle); }

  std::string corpus_text() const;
  /// JSON object {"size": n, "programs": {"0": "...", ...}}.
  std::string manifest_json() const;

 private:
  std::vector<ToyProgram> programs_;
  std::optional<Oracle> oracle_;
};

/// Text of the shipped corpus, one program per line.
std::string_view shipped_corpus_text();

/// phi_e(n) within `steps` instructions, using the enumeration's oracle unless
/// `oracle` is given. Throws OracleHorizonExceeded on reads past the horizon.
std::optional<std::uint64_t> phi(const ToyEnumeration& enumeration, std::size_t e,
                                 std::uint64_t n, std::uint64_t steps,
                                 const Oracle* oracle = nullptr);

/// phi_e(e) for every program, computed once at a fixed maximal budget.
class DiagonalTable {
 public:
  struct Entry {
    std::optional<std::uint64_t> value;
    std::uint64_t halt_step = 0;
    bool oracle_horizon_exceeded = false;  // recorded as divergent
  };

  DiagonalTable(const ToyEnumeration& enumeration, std::uint64_t max_steps);

  std::size_t size() const { return entries_.size(); }
  std::uint64_t max_steps() const { return max_steps_; }
  const Entry& entry(std::size_t e) const { return entries_.at(e); }
  /// phi_e(e) if it halts within `steps` (steps are clamped to max_steps).
  std::optional<std::uint64_t> value_at(std::size_t e, std::uint64_t steps) const;
  /// True iff some e < |sigma| has phi_e(e) = sigma(e) within `steps`.
  bool forbids(const OmegaString& sigma, std::uint64_t steps) const;

 private:
  std::vector<Entry> entries_;
  std::uint64_t max_steps_;
};

/// B_DNC as an enumerable set; the stage is the step budget.
class BDncSet final : public EnumerableSet {
 public:
  explicit BDncSet(const DiagonalTable& table) : table_(table) {}
  bool contains(const OmegaString& x, Stage stage) const override {
    return table_.forbids(x, stage);
  }

 private:
  const DiagonalTable& table_;
};

/// Members of B_DNC at `stage` inside the capped grid.
StringSet b_dnc_stage(const ToyEnumeration& enumeration, Stage stage, Caps caps);

/// True iff no e < |sigma| has phi_e(e) = sigma(e) within `steps`.
bool is_dnc_prefix(const OmegaString& sigma, const ToyEnumeration& enumeration,
                   std::uint64_t steps);
bool is_dnc_prefix(const OmegaString& sigma, const DiagonalTable& table, std::uint64_t steps);

/// A toy program read as a monotone map from strings to bit strings: input
/// values come from READ, output bits from OUT. Bits are never retracted, so
/// monotonicity in the input and in the budget holds by construction.
class Functional {
 public:
  Functional() = default;
  Functional(std::string name, ToyProgram program)
      : name_(std::move(name)), program_(std::move(program)) {}

  /// Looks up a library functional by name, or parses "program:<code>".
  /// Names: constant:<bits>, everywhere-partial, copy-parity,
  /// fixed-emitter:<bits>:<reads>, use-all-input, even-prefix:<delay>,
  /// delayed-copy-parity:<delay>.
  static Functional named(std::string_view name);

  static Functional constant(const BitString& bits);
  static Functional everywhere_partial();
  static Functional copy_parity();
  static Functional fixed_emitter(const BitString& bits, std::uint64_t reads);
  static Functional use_all_input();
  static Functional even_prefix(std::uint64_t delay);
  static Functional delayed_copy_parity(std::uint64_t delay);

  const std::string& name() const { return name_; }
  const ToyProgram& program() const { return program_; }

 private:
  std::string name_;
  ToyProgram program_;
};

/// Output of the functional on input tau within `steps` instructions.
struct GammaRun {
  BitString output;
  std::size_t use = 0;
  RunStatus status = RunStatus::kRunning;
};

GammaRun gamma_run(const Functional& gamma, const OmegaString& tau, std::uint64_t steps);
BitString gamma_output(const Functional& gamma, const OmegaString& tau, std::uint64_t steps);

}  // namespace bushy
