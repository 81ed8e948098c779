#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bushy/omega_string.hpp"

namespace bushy {

/// The sixteen opcodes of the toy stack machine. Every executed instruction
/// costs one step. Words are unsigned 64-bit; SUB is truncated at zero and
/// MOD by zero yields zero.
enum class Op : std::uint8_t {
  kPush,    // PUSH c    -> c
  kAdd,     // a b       -> a+b
  kSub,     // a b       -> max(a-b, 0)
  kMul,     // a b       -> a*b
  kMod,     // a b       -> a mod b
  kDup,     // a         -> a a
  kSwap,    // a b       -> b a
  kDrop,    // a         ->
  kLt,      // a b       -> (a < b)
  kJz,      // JZ t: pop; jump to t if zero
  kJmp,     // JMP t
  kArg,     //           -> argument
  kRead,    // i         -> tape(i); blocks if i is past the tape
  kOracle,  // i         -> X(i); error past the oracle horizon
  kOut,     // a         -> ; emits bit a mod 2
  kHalt,    // a         -> ; halts with output a
};

inline constexpr std::size_t kOpCount = 16;

std::string_view mnemonic(Op op);
std::optional<Op> parse_mnemonic(std::string_view text);
bool takes_operand(Op op);

struct Instruction {
  Op op = Op::kHalt;
  std::uint64_t operand = 0;
  friend bool operator==(const Instruction&, const Instruction&) = default;
};

class ProgramParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A program: a finite instruction list. Text form is space-separated
/// mnemonics with operands after PUSH, JZ and JMP, e.g. "PUSH 7 HALT".
class ToyProgram {
 public:
  ToyProgram() = default;
  explicit ToyProgram(std::vector<Instruction> code) : code_(std::move(code)) {}

  static ToyProgram parse(std::string_view text);
  std::string to_string() const;

  const std::vector<Instruction>& code() const { return code_; }
  std::size_t size() const { return code_.size(); }

  friend bool operator==(const ToyProgram&, const ToyProgram&) = default;

 private:
  std::vector<Instruction> code_;
};

/// Finite oracle prefix X with an explicit horizon.
struct Oracle {
  std::vector<bool> bits;
  std::size_t horizon() const { return bits.size(); }
};

class OracleHorizonExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct MachineInput {
  std::uint64_t argument = 0;
  const OmegaString* tape = nullptr;
  const Oracle* oracle = nullptr;
};

enum class RunStatus {
  kHalted,   // executed HALT
  kRunning,  // step budget exhausted
  kBlocked,  // READ past the end of the tape
  kFaulted,  // stack underflow or pc out of range; never halts
};

struct RunResult {
  RunStatus status = RunStatus::kRunning;
  std::optional<std::uint64_t> value;  // set iff halted
  BitString output;                    // bits emitted by OUT
  std::uint64_t steps = 0;             // instructions executed
  std::size_t use = 0;                 // 1 + largest tape index read
};

/// Runs `program` for at most `max_steps` instructions. Deterministic and
/// monotone in max_steps. Throws OracleHorizonExceeded when the program reads
/// the oracle at or past its horizon (or when no oracle is supplied).
RunResult execute(const ToyProgram& program, const MachineInput& input, std::uint64_t max_steps);

}  // namespace bushy
