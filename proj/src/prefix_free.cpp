#include "bushy/prefix_free.hpp"

#include <bit>

#include "bushy/toy_machine.hpp"

namespace bushy {

namespace {

constexpr std::size_t kOpcodeBits = 4;

void append_binary(BitString& out, std::uint64_t v, std::size_t width) {
  for (std::size_t i = width; i-- > 0;) out.push_back(((v >> i) & 1) ? '1' : '0');
}

BitString wrap(const BitString& payload) { return elias_gamma(payload.size() + 1) + payload; }

}  // namespace

BitString elias_gamma(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("elias_gamma: n must be positive");
  const std::size_t width = std::bit_width(n);
  BitString out(width - 1, '0');
  append_binary(out, n, width);
  return out;
}

std::optional<std::uint64_t> read_elias_gamma(const BitString& bits, std::size_t& pos) {
  std::size_t zeros = 0;
  while (pos + zeros < bits.size() && bits[pos + zeros] == '0') ++zeros;
  if (zeros >= 64 || pos + 2 * zeros + 1 > bits.size()) return std::nullopt;
  std::uint64_t v = 0;
  for (std::size_t i = 0; i <= zeros; ++i) v = (v << 1) | (bits[pos + zeros + i] == '1' ? 1 : 0);
  pos += 2 * zeros + 1;
  return v;
}

BitString PrefixFreeMachine::literal_description(const BitString& x) { return wrap("00" + x); }

BitString PrefixFreeMachine::repeat_description(std::uint64_t count, const BitString& pattern) {
  return wrap("01" + elias_gamma(count) + pattern);
}

BitString PrefixFreeMachine::program_description(const ToyProgram& program) {
  BitString payload = "10";
  for (const auto& ins : program.code()) {
    append_binary(payload, static_cast<std::uint64_t>(ins.op), kOpcodeBits);
    if (takes_operand(ins.op)) payload += elias_gamma(ins.operand + 1);
  }
  return wrap(payload);
}

std::uint64_t PrefixFreeMachine::literal_overhead(std::size_t n) {
  return elias_gamma(n + 3).size() + 2;
}

std::optional<PrefixFreeMachine::Run> PrefixFreeMachine::run(const BitString& description,
                                                             std::uint64_t t) const {
  std::size_t pos = 0;
  const auto len = read_elias_gamma(description, pos);
  if (!len || *len == 0 || description.size() - pos != *len - 1) return std::nullopt;
  const BitString payload = description.substr(pos);
  if (payload.size() < 2) return std::nullopt;
  const std::string tag = payload.substr(0, 2);
  Run out;
  if (tag == "00") {
    out.output = payload.substr(2);
    out.steps = out.output.size();
  } else if (tag == "01") {
    std::size_t p = 2;
    const auto count = read_elias_gamma(payload, p);
    if (!count) return std::nullopt;
    const BitString pattern = payload.substr(p);
    out.steps = *count * pattern.size();
    if (out.steps > t) return std::nullopt;
    for (std::uint64_t i = 0; i < *count; ++i) out.output += pattern;
  } else if (tag == "10") {
    std::vector<Instruction> code;
    std::size_t p = 2;
    while (p < payload.size()) {
      if (p + kOpcodeBits > payload.size()) return std::nullopt;
      std::uint64_t op = 0;
      for (std::size_t i = 0; i < kOpcodeBits; ++i) op = (op << 1) | (payload[p + i] == '1');
      p += kOpcodeBits;
      Instruction ins{static_cast<Op>(op), 0};
      if (takes_operand(ins.op)) {
        const auto operand = read_elias_gamma(payload, p);
        if (!operand) return std::nullopt;
        ins.operand = *operand - 1;
      }
      code.push_back(ins);
    }
    const RunResult r = execute(ToyProgram(std::move(code)), MachineInput{}, t);
    if (r.status != RunStatus::kHalted) return std::nullopt;
    out.output = r.output;
    out.steps = r.steps;
  } else {
    return std::nullopt;
  }
  if (out.steps > t) return std::nullopt;
  return out;
}

PrefixFreeMachine::PrefixFreeMachine(std::size_t program_basis_len,
                                     std::uint64_t program_step_cap) {
  // Programs without ARG/READ/ORACLE over a small operand alphabet.
  std::vector<Instruction> alphabet;
  for (std::size_t op = 0; op < kOpCount; ++op) {
    const auto o = static_cast<Op>(op);
    if (o == Op::kArg || o == Op::kRead || o == Op::kOracle) continue;
    if (takes_operand(o)) {
      for (std::uint64_t c = 0; c < std::max<std::size_t>(program_basis_len, 2); ++c) {
        alphabet.push_back({o, c});
      }
    } else {
      alphabet.push_back({o, 0});
    }
  }
  for (std::size_t len = 1; len <= program_basis_len; ++len) {
    std::vector<std::size_t> digits(len, 0);
    for (;;) {
      std::vector<Instruction> code;
      for (auto d : digits) code.push_back(alphabet[d]);
      ToyProgram program(std::move(code));
      const RunResult r = execute(program, MachineInput{}, program_step_cap);
      if (r.status == RunStatus::kHalted && !r.output.empty()) {
        const BasisEntry entry{program_description(program).size(), r.steps};
        auto [it, inserted] = basis_.emplace(r.output, entry);
        if (!inserted && (entry.length < it->second.length ||
                          (entry.length == it->second.length && entry.steps < it->second.steps))) {
          it->second = entry;
        }
      }
      std::size_t pos = len;
      while (pos > 0 && ++digits[pos - 1] == alphabet.size()) digits[--pos] = 0;
      if (pos == 0) break;
    }
  }
}

std::uint64_t PrefixFreeMachine::k_approx(const BitString& x, std::uint64_t t) const {
  std::uint64_t best = literal_description(x).size();
  const std::size_t n = x.size();
  for (std::size_t period = 1; period < n; ++period) {
    if (n % period != 0 || n > t) continue;
    bool periodic = true;
    for (std::size_t i = period; i < n && periodic; ++i) periodic = x[i] == x[i - period];
    if (!periodic) continue;
    const std::uint64_t len = repeat_description(n / period, x.substr(0, period)).size();
    best = std::min(best, len);
  }
  if (auto it = basis_.find(x); it != basis_.end() && it->second.steps <= t) {
    best = std::min(best, it->second.length);
  }
  return best;
}

bool is_h_complex_prefix(const BitString& x, const GrowthFn& h0, std::uint64_t c,
                         const PrefixFreeMachine& machine, std::uint64_t t) {
  for (std::size_t n = 0;; ++n) {
    const Natural cut = h0(n);
    if (cut > x.size()) return true;
    const auto k = static_cast<std::int64_t>(
        machine.k_approx(x.substr(0, static_cast<std::size_t>(cut)), t));
    if (k < static_cast<std::int64_t>(n) - static_cast<std::int64_t>(c)) return false;
  }
}

}  // namespace bushy
