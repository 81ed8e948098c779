#include "bushy/toy_machine.hpp"

#include <array>
#include <sstream>

namespace bushy {

namespace {

constexpr std::array<std::string_view, kOpCount> kMnemonics = {
    "PUSH", "ADD", "SUB", "MUL", "MOD", "DUP", "SWAP", "DROP",
    "LT",   "JZ",  "JMP", "ARG", "READ", "ORACLE", "OUT", "HALT"};

}  // namespace

std::string_view mnemonic(Op op) { return kMnemonics[static_cast<std::size_t>(op)]; }

std::optional<Op> parse_mnemonic(std::string_view text) {
  for (std::size_t i = 0; i < kMnemonics.size(); ++i) {
    if (kMnemonics[i] == text) return static_cast<Op>(i);
  }
  return std::nullopt;
}

bool takes_operand(Op op) { return op == Op::kPush || op == Op::kJz || op == Op::kJmp; }

ToyProgram ToyProgram::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<Instruction> code;
  std::string word;
  while (in >> word) {
    auto op = parse_mnemonic(word);
    if (!op) throw ProgramParseError("unknown mnemonic '" + word + "'");
    Instruction ins{*op, 0};
    if (takes_operand(*op)) {
      std::string arg;
      if (!(in >> arg)) throw ProgramParseError(word + " needs an operand");
      try {
        std::size_t used = 0;
        ins.operand = std::stoull(arg, &used);
        if (used != arg.size()) throw std::invalid_argument(arg);
      } catch (const std::exception&) {
        throw ProgramParseError("bad operand '" + arg + "' for " + word);
      }
    }
    code.push_back(ins);
  }
  return ToyProgram(std::move(code));
}

std::string ToyProgram::to_string() const {
  std::string out;
  for (const auto& ins : code_) {
    if (!out.empty()) out += ' ';
    out += mnemonic(ins.op);
    if (takes_operand(ins.op)) out += ' ' + std::to_string(ins.operand);
  }
  return out;
}

RunResult execute(const ToyProgram& program, const MachineInput& input, std::uint64_t max_steps) {
  RunResult r;
  std::vector<std::uint64_t> stack;
  std::size_t pc = 0;
  const auto& code = program.code();

  auto fault = [&] { r.status = RunStatus::kFaulted; };
  auto pop = [&](std::uint64_t& v) {
    if (stack.empty()) return false;
    v = stack.back();
    stack.pop_back();
    return true;
  };

  while (r.steps < max_steps) {
    if (pc >= code.size()) {
      fault();
      return r;
    }
    const Instruction ins = code[pc];
    ++r.steps;
    ++pc;
    std::uint64_t a = 0;
    std::uint64_t b = 0;
    switch (ins.op) {
      case Op::kPush:
        stack.push_back(ins.operand);
        break;
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kMod:
      case Op::kLt:
        if (!pop(b) || !pop(a)) return fault(), r;
        switch (ins.op) {
          case Op::kAdd: stack.push_back(a + b); break;
          case Op::kSub: stack.push_back(a > b ? a - b : 0); break;
          case Op::kMul: stack.push_back(a * b); break;
          case Op::kMod: stack.push_back(b == 0 ? 0 : a % b); break;
          default: stack.push_back(a < b ? 1 : 0); break;
        }
        break;
      case Op::kDup:
        if (stack.empty()) return fault(), r;
        stack.push_back(stack.back());
        break;
      case Op::kSwap:
        if (stack.size() < 2) return fault(), r;
        std::swap(stack[stack.size() - 1], stack[stack.size() - 2]);
        break;
      case Op::kDrop:
        if (!pop(a)) return fault(), r;
        break;
      case Op::kJz:
        if (!pop(a)) return fault(), r;
        if (a == 0) pc = static_cast<std::size_t>(ins.operand);
        break;
      case Op::kJmp:
        pc = static_cast<std::size_t>(ins.operand);
        break;
      case Op::kArg:
        stack.push_back(input.argument);
        break;
      case Op::kRead: {
        if (!pop(a)) return fault(), r;
        if (input.tape == nullptr || a >= input.tape->size()) {
          r.status = RunStatus::kBlocked;
          return r;
        }
        r.use = std::max(r.use, static_cast<std::size_t>(a) + 1);
        stack.push_back(low64((*input.tape)[static_cast<std::size_t>(a)]));
        break;
      }
      case Op::kOracle: {
        if (!pop(a)) return fault(), r;
        const std::size_t horizon = input.oracle ? input.oracle->horizon() : 0;
        if (a >= horizon) {
          throw OracleHorizonExceeded("oracle read at index " + std::to_string(a) +
                                      " past horizon " + std::to_string(horizon));
        }
        stack.push_back(input.oracle->bits[static_cast<std::size_t>(a)] ? 1 : 0);
        break;
      }
      case Op::kOut:
        if (!pop(a)) return fault(), r;
        r.output.push_back((a & 1) ? '1' : '0');
        break;
      case Op::kHalt:
        if (!pop(a)) return fault(), r;
        r.status = RunStatus::kHalted;
        r.value = a;
        return r;
    }
  }
  r.status = RunStatus::kRunning;
  return r;
}

}  // namespace bushy
