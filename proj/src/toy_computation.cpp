#include "bushy/toy_computation.hpp"

#include <bit>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bushy {

namespace {

Oracle thue_morse(std::size_t n) {
  Oracle x;
  x.bits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) x.bits.push_back(std::popcount(i) % 2 == 1);
  return x;
}

void canonical_alphabet(std::size_t max_len, std::vector<Instruction>& out) {
  for (std::size_t op = 0; op < kOpCount; ++op) {
    const auto o = static_cast<Op>(op);
    if (o == Op::kPush) {
      for (std::uint64_t c : {0, 1, 2, 3}) out.push_back({o, c});
    } else if (o == Op::kJz || o == Op::kJmp) {
      for (std::uint64_t t = 0; t < max_len; ++t) out.push_back({o, t});
    } else {
      out.push_back({o, 0});
    }
  }
}

}  // namespace

ToyEnumeration ToyEnumeration::shipped() {
  ToyEnumeration e = parse_corpus(shipped_corpus_text());
  e.oracle_ = thue_morse(128);
  return e;
}

ToyEnumeration ToyEnumeration::parse_corpus(std::string_view text) {
  std::vector<ToyProgram> programs;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      programs.push_back(ToyProgram::parse(line));
    } catch (const ProgramParseError& err) {
      throw ProgramParseError("corpus line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  return ToyEnumeration(std::move(programs));
}

ToyEnumeration ToyEnumeration::canonical(std::size_t max_len) {
  std::vector<Instruction> alphabet;
  canonical_alphabet(max_len, alphabet);
  std::vector<ToyProgram> programs;
  for (std::size_t len = 1; len <= max_len; ++len) {
    std::vector<std::size_t> digits(len, 0);
    for (;;) {
      std::vector<Instruction> code;
      code.reserve(len);
      for (auto d : digits) code.push_back(alphabet[d]);
      programs.emplace_back(std::move(code));
      std::size_t pos = len;
      while (pos > 0 && ++digits[pos - 1] == alphabet.size()) digits[--pos] = 0;
      if (pos == 0) break;
    }
  }
  return ToyEnumeration(std::move(programs));
}

std::string ToyEnumeration::corpus_text() const {
  std::string out;
  for (const auto& p : programs_) out += p.to_string() + "\n";
  return out;
}

std::string ToyEnumeration::manifest_json() const {
  nlohmann::ordered_json programs = nlohmann::ordered_json::object();
  for (std::size_t e = 0; e < programs_.size(); ++e) {
    programs[std::to_string(e)] = programs_[e].to_string();
  }
  nlohmann::ordered_json j;
  j["size"] = programs_.size();
  j["oracle_horizon"] = oracle_ ? oracle_->horizon() : 0;
  j["programs"] = std::move(programs);
  return j.dump(2);
}

std::optional<std::uint64_t> phi(const ToyEnumeration& enumeration, std::size_t e,
                                 std::uint64_t n, std::uint64_t steps, const Oracle* oracle) {
  if (e >= enumeration.size()) {
    throw std::out_of_range("phi: index " + std::to_string(e) + " outside the enumeration");
  }
  MachineInput input;
  input.argument = n;
  input.oracle = oracle ? oracle : (enumeration.oracle() ? &*enumeration.oracle() : nullptr);
  const RunResult r = execute(enumeration.program(e), input, steps);
  return r.value;
}

DiagonalTable::DiagonalTable(const ToyEnumeration& enumeration, std::uint64_t max_steps)
    : max_steps_(max_steps) {
  entries_.reserve(enumeration.size());
  for (std::size_t e = 0; e < enumeration.size(); ++e) {
    MachineInput input;
    input.argument = e;
    input.oracle = enumeration.oracle() ? &*enumeration.oracle() : nullptr;
    Entry entry;
    try {
      const RunResult r = execute(enumeration.program(e), input, max_steps);
      if (r.status == RunStatus::kHalted) {
        entry.value = r.value;
        entry.halt_step = r.steps;
      }
    } catch (const OracleHorizonExceeded&) {
      entry.oracle_horizon_exceeded = true;
    }
    entries_.push_back(entry);
  }
}

std::optional<std::uint64_t> DiagonalTable::value_at(std::size_t e, std::uint64_t steps) const {
  if (e >= entries_.size()) return std::nullopt;
  const Entry& entry = entries_[e];
  if (entry.value && entry.halt_step <= std::min(steps, max_steps_)) return entry.value;
  return std::nullopt;
}

bool DiagonalTable::forbids(const OmegaString& sigma, std::uint64_t steps) const {
  const std::size_t n = std::min(sigma.size(), entries_.size());
  for (std::size_t e = 0; e < n; ++e) {
    auto v = value_at(e, steps);
    if (v && sigma[e] == *v) return true;
  }
  return false;
}

StringSet b_dnc_stage(const ToyEnumeration& enumeration, Stage stage, Caps caps) {
  const DiagonalTable table(enumeration, stage);
  return snapshot(BDncSet(table), stage, caps);
}

bool is_dnc_prefix(const OmegaString& sigma, const ToyEnumeration& enumeration,
                   std::uint64_t steps) {
  const std::size_t n = std::min(sigma.size(), enumeration.size());
  for (std::size_t e = 0; e < n; ++e) {
    auto v = phi(enumeration, e, e, steps);
    if (v && sigma[e] == *v) return false;
  }
  return true;
}

bool is_dnc_prefix(const OmegaString& sigma, const DiagonalTable& table, std::uint64_t steps) {
  return !table.forbids(sigma, steps);
}

namespace {

std::string emit_bits(const BitString& bits) {
  std::string code;
  for (char b : bits) code += std::string(" PUSH ") + (b == '1' ? "1" : "0") + " OUT";
  return code;
}

void require_bits(const BitString& bits) {
  for (char b : bits) {
    if (b != '0' && b != '1') throw std::invalid_argument("bit string expected, got '" + bits + "'");
  }
}

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  try {
    std::size_t used = 0;
    const std::string s(text);
    const auto v = std::stoull(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument(std::string(what) + ": expected a natural, got '" +
                                std::string(text) + "'");
  }
}

}  // namespace

Functional Functional::constant(const BitString& bits) {
  require_bits(bits);
  return Functional("constant:" + bits, ToyProgram::parse(emit_bits(bits) + " PUSH 0 HALT"));
}

Functional Functional::everywhere_partial() {
  return Functional("everywhere-partial", ToyProgram::parse("JMP 0"));
}

Functional Functional::copy_parity() {
  return Functional("copy-parity", ToyProgram::parse("PUSH 0 DUP READ OUT PUSH 1 ADD JMP 1"));
}

Functional Functional::fixed_emitter(const BitString& bits, std::uint64_t reads) {
  require_bits(bits);
  std::string code;
  if (reads > 0) code = "PUSH " + std::to_string(reads - 1) + " READ DROP";
  code += emit_bits(bits) + " PUSH 0 HALT";
  return Functional("fixed-emitter:" + bits + ":" + std::to_string(reads),
                    ToyProgram::parse(code));
}

Functional Functional::use_all_input() {
  return Functional("use-all-input",
                    ToyProgram::parse("PUSH 0 DUP DUP READ ADD OUT PUSH 1 ADD JMP 1"));
}

Functional Functional::even_prefix(std::uint64_t delay) {
  const std::string d = std::to_string(delay);
  return Functional("even-prefix:" + d,
                    ToyProgram::parse("PUSH 0 DUP READ PUSH 2 MOD JZ 7 JMP 6 PUSH " + d +
                                      " DUP JZ 13 PUSH 1 SUB JMP 8 DROP PUSH 1 OUT PUSH 1 ADD "
                                      "JMP 1"));
}

Functional Functional::delayed_copy_parity(std::uint64_t delay) {
  const std::string d = std::to_string(delay);
  return Functional("delayed-copy-parity:" + d,
                    ToyProgram::parse("PUSH 0 PUSH " + d +
                                      " DUP JZ 7 PUSH 1 SUB JMP 2 DROP DUP READ OUT PUSH 1 ADD "
                                      "JMP 1"));
}

Functional Functional::named(std::string_view name) {
  auto field = [&](std::size_t index) -> std::string_view {
    std::size_t start = 0;
    for (std::size_t i = 0; i < index; ++i) {
      start = name.find(':', start);
      if (start == std::string_view::npos) return {};
      ++start;
    }
    const auto end = name.find(':', start);
    return name.substr(start, end == std::string_view::npos ? name.npos : end - start);
  };
  const std::string_view head = field(0);
  if (name.starts_with("program:")) {
    return Functional(std::string(name), ToyProgram::parse(name.substr(8)));
  }
  if (head == "everywhere-partial") return everywhere_partial();
  if (head == "copy-parity") return copy_parity();
  if (head == "use-all-input") return use_all_input();
  if (head == "constant") return constant(std::string(field(1)));
  if (head == "fixed-emitter") {
    return fixed_emitter(std::string(field(1)), parse_u64(field(2), "fixed-emitter reads"));
  }
  if (head == "even-prefix") return even_prefix(parse_u64(field(1), "even-prefix delay"));
  if (head == "delayed-copy-parity") {
    return delayed_copy_parity(parse_u64(field(1), "delayed-copy-parity delay"));
  }
  throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

GammaRun gamma_run(const Functional& gamma, const OmegaString& tau, std::uint64_t steps) {
  MachineInput input;
  input.tape = &tau;
  const RunResult r = execute(gamma.program(), input, steps);
  return GammaRun{r.output, r.use, r.status};
}

BitString gamma_output(const Functional& gamma, const OmegaString& tau, std::uint64_t steps) {
  return gamma_run(gamma, tau, steps).output;
}

}  // namespace bushy
