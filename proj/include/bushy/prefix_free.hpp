#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "bushy/growth_fn.hpp"
#include "bushy/omega_string.hpp"
#include "bushy/toy_machine.hpp"

namespace bushy {

/// Elias gamma code of n >= 1: floor(log2 n) zeros, then n in binary.
BitString elias_gamma(std::uint64_t n);
/// Decodes one Elias gamma codeword starting at `pos`; advances `pos`.
std::optional<std::uint64_t> read_elias_gamma(const BitString& bits, std::size_t& pos);

/// A fixed self-delimiting machine. A description is E(|payload| + 1) followed
/// by the payload, where E is the Elias gamma code, so the domain is
/// prefix-free. The payload starts with a two-bit tag:
///   00 literal  : the rest of the payload is the output; costs |output| steps.
///   01 repeat   : E(count) then a pattern; outputs pattern^count; costs
///                 count * |pattern| steps.
///   10 program  : toy instructions, each a 4-bit opcode followed by
///                 E(operand + 1) for PUSH/JZ/JMP; the output is the OUT bits
///                 of a run that halts; costs the executed steps.
class PrefixFreeMachine {
 public:
  struct Run {
    BitString output;
    std::uint64_t steps = 0;
  };

  /// `program_basis_len` bounds the instruction count of the toy programs
  /// searched by k_approx; `program_step_cap` is their step budget.
  explicit PrefixFreeMachine(std::size_t program_basis_len = 3,
                             std::uint64_t program_step_cap = 64);

  /// Runs one description for at most `t` steps. nullopt if the description is
  /// malformed, has trailing bits, or does not halt in time.
  std::optional<Run> run(const BitString& description, std::uint64_t t) const;

  static BitString literal_description(const BitString& x);
  static BitString repeat_description(std::uint64_t count, const BitString& pattern);
  static BitString program_description(const ToyProgram& program);

  /// |literal_description(x)| - |x| for |x| = n.
  static std::uint64_t literal_overhead(std::size_t n);

  /// Length of the shortest description found that outputs x within t steps;
  /// the literal description is always admitted.
  std::uint64_t k_approx(const BitString& x, std::uint64_t t) const;

 private:
  struct BasisEntry {
    std::uint64_t length;
    std::uint64_t steps;
  };
  std::map<BitString, BasisEntry> basis_;
};

/// True iff k_approx(x restricted to h0(n)) >= n - c for every n with h0(n) <= |x|.
bool is_h_complex_prefix(const BitString& x, const GrowthFn& h0, std::uint64_t c,
                         const PrefixFreeMachine& machine, std::uint64_t t);

}  // namespace bushy
