#include "bushy/prefix_free.hpp"
#include "bushy/random.hpp"
#include "bushy/toy_computation.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

namespace bushy {
namespace {

OmegaString S(std::initializer_list<std::uint64_t> v) {
  return OmegaString::from_u64(std::vector<std::uint64_t>(v));
}

// Second interpreter working directly on the token stream.
std::optional<std::uint64_t> reference_run(const std::string& text, std::uint64_t arg,
                                           const std::vector<bool>& oracle,
                                           std::uint64_t budget) {
  std::vector<std::pair<std::string, std::uint64_t>> prog;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    std::uint64_t operand = 0;
    if (tok == "PUSH" || tok == "JZ" || tok == "JMP") in >> operand;
    prog.emplace_back(tok, operand);
  }
  std::vector<std::uint64_t> st;
  std::uint64_t pc = 0;
  for (std::uint64_t step = 0; step < budget; ++step) {
    if (pc >= prog.size()) return std::nullopt;
    const auto& [op, x] = prog[pc++];
    auto need = [&](std::size_t k) { return st.size() >= k; };
    if (op == "PUSH") {
      st.push_back(x);
    } else if (op == "ARG") {
      st.push_back(arg);
    } else if (op == "JMP") {
      pc = x;
    } else if (op == "DUP") {
      if (!need(1)) return std::nullopt;
      st.push_back(st.back());
    } else if (op == "HALT") {
      if (!need(1)) return std::nullopt;
      return st.back();
    } else if (op == "READ") {
      return std::nullopt;
    } else if (op == "DROP" || op == "OUT" || op == "JZ" || op == "ORACLE") {
      if (!need(1)) return std::nullopt;
      const auto a = st.back();
      st.pop_back();
      if (op == "JZ" && a == 0) pc = x;
      if (op == "ORACLE") st.push_back(oracle.at(a) ? 1 : 0);
    } else {
      if (!need(2)) return std::nullopt;
      const auto b = st.back();
      st.pop_back();
      const auto a = st.back();
      st.pop_back();
      if (op == "ADD") st.push_back(a + b);
      if (op == "SUB") st.push_back(a >= b ? a - b : 0);
      if (op == "MUL") st.push_back(a * b);
      if (op == "MOD") st.push_back(b ? a % b : 0);
      if (op == "LT") st.push_back(a < b);
      if (op == "SWAP") {
        st.push_back(b);
        st.push_back(a);
      }
    }
  }
  return std::nullopt;
}

TEST(ToyMachine, ParsePrintRoundTrip) {
  const std::string text = "PUSH 7 DUP JZ 4 HALT";
  EXPECT_EQ(ToyProgram::parse(text).to_string(), text);
  EXPECT_THROW(ToyProgram::parse("PUSH"), ProgramParseError);
  EXPECT_THROW(ToyProgram::parse("FOO"), ProgramParseError);
}

TEST(ToyComputation, PhiExamples) {
  ToyEnumeration e({ToyProgram::parse("PUSH 7 HALT"), ToyProgram::parse("JMP 0")});
  EXPECT_EQ(phi(e, 0, 0, 1), std::nullopt);
  EXPECT_EQ(phi(e, 0, 0, 2), std::optional<std::uint64_t>(7));
  for (std::uint64_t s : {0, 1, 10, 1000}) EXPECT_EQ(phi(e, 1, 3, s), std::nullopt);
}

TEST(ToyComputation, OracleHorizon) {
  ToyEnumeration e({ToyProgram::parse("ARG ORACLE HALT")}, Oracle{{true, false}});
  EXPECT_EQ(phi(e, 0, 0, 10), std::optional<std::uint64_t>(1));
  EXPECT_EQ(phi(e, 0, 1, 10), std::optional<std::uint64_t>(0));
  EXPECT_THROW(phi(e, 0, 2, 10), OracleHorizonExceeded);
}

TEST(ToyComputation, ShippedCorpusMatchesDataFile) {
  std::ifstream f(std::string(BUSHY_SOURCE_DIR) + "/data/corpus64.txt");
  ASSERT_TRUE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  EXPECT_EQ(ss.str(), std::string(shipped_corpus_text()));
  EXPECT_EQ(ToyEnumeration::shipped().size(), 64u);
}

TEST(ToyComputation, DiagonalTableMatchesReferenceInterpreter) {
  const auto e = ToyEnumeration::shipped();
  const DiagonalTable table(e, 10000);
  std::size_t halting = 0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const auto ref = reference_run(e.program(i).to_string(), i, e.oracle()->bits, 10000);
    EXPECT_EQ(table.value_at(i, 10000), ref) << "program " << i;
    halting += ref.has_value();
  }
  EXPECT_GT(halting, 20u);
  EXPECT_LT(halting, 60u);
}

TEST(ToyComputation, BDncStage) {
  ToyEnumeration e({ToyProgram::parse("PUSH 2 PUSH 3 ADD HALT")});
  const Caps caps{2, 8};
  EXPECT_TRUE(b_dnc_stage(e, 0, caps).empty());
  EXPECT_TRUE(b_dnc_stage(e, 3, caps).empty());
  const auto s4 = b_dnc_stage(e, 4, caps);
  EXPECT_EQ(s4.size(), 1u + 8u);
  EXPECT_TRUE(s4.count(S({5})));
  for (std::uint64_t v = 0; v < 8; ++v) EXPECT_TRUE(s4.count(S({5, v})));
  for (const auto& x : s4) EXPECT_EQ(x[0], 5);
}

TEST(ToyComputation, BDncUpwardClosedAndAtMostOneForbiddenValue) {
  const auto e = ToyEnumeration::shipped();
  const Caps caps{3, 8};
  for (Stage s : {1, 2, 5, 40}) {
    const auto set = b_dnc_stage(e, s, caps);
    for (const auto& x : set) {
      for_each_grid_node(x, caps, [&](const OmegaString& y) { EXPECT_TRUE(set.count(y)); });
    }
    for (std::size_t i = 0; i < caps.depth_cap; ++i) {
      std::size_t forbidden = 0;
      for (std::uint64_t v = 0; v < caps.width_cap; ++v) {
        OmegaString x = OmegaString::from_u64(std::vector<std::uint64_t>(i, 1));
        x.push_back(v);
        // Coordinate i is forbidden at v iff x is in B_DNC but its parent is not.
        if (set.count(x) && !set.count(x.prefix(i))) ++forbidden;
      }
      EXPECT_LE(forbidden, 1u);
    }
    const auto later = b_dnc_stage(e, s + 7, caps);
    for (const auto& x : set) EXPECT_TRUE(later.count(x));
  }
}

TEST(ToyComputation, IsDncPrefix) {
  const auto e = ToyEnumeration::shipped();
  EXPECT_TRUE(is_dnc_prefix(OmegaString{}, e, 100));
  const auto v0 = *phi(e, 0, 0, 100);
  EXPECT_TRUE(is_dnc_prefix(S({v0 + 1}), e, 100));
  EXPECT_FALSE(is_dnc_prefix(S({v0}), e, 100));
  const Caps caps{3, 6};
  const auto set = b_dnc_stage(e, 30, caps);
  for_each_grid_node(OmegaString{}, caps, [&](const OmegaString& x) {
    bool any = false;
    for (std::size_t n = 0; n <= x.size(); ++n) any = any || set.count(x.prefix(n));
    EXPECT_EQ(is_dnc_prefix(x, e, 30), !any);
  });
}

TEST(ToyComputation, FunctionalLibrary) {
  EXPECT_EQ(gamma_output(Functional::copy_parity(), S({3, 4}), 1000), "10");
  EXPECT_EQ(gamma_output(Functional::everywhere_partial(), S({3, 4}), 1000), "");
  EXPECT_EQ(gamma_output(Functional::constant("0110"), S({}), 1000), "0110");
  EXPECT_EQ(gamma_output(Functional::fixed_emitter("11", 2), S({5}), 1000), "");
  EXPECT_EQ(gamma_output(Functional::fixed_emitter("11", 2), S({5, 0}), 1000), "11");
  EXPECT_EQ(gamma_output(Functional::use_all_input(), S({1, 1, 0}), 1000), "100");
  EXPECT_EQ(gamma_output(Functional::even_prefix(2), S({2, 4, 3, 2}), 1000), "11");
  EXPECT_EQ(gamma_output(Functional::delayed_copy_parity(3), S({1, 2, 3}), 1000), "101");
  EXPECT_EQ(Functional::named("fixed-emitter:10:3").name(), "fixed-emitter:10:3");
  EXPECT_EQ(Functional::named("program:PUSH 1 OUT PUSH 0 HALT").program().size(), 4u);
  EXPECT_THROW(Functional::named("nope"), std::invalid_argument);
}

TEST(ToyComputation, FunctionalMonotone) {
  const std::vector<Functional> lib = {
      Functional::copy_parity(), Functional::use_all_input(), Functional::even_prefix(3),
      Functional::delayed_copy_parity(4), Functional::fixed_emitter("101", 2)};
  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto& g = lib[trial % lib.size()];
    OmegaString tau;
    const auto len = rng.below(std::uint64_t{8});
    for (std::uint64_t i = 0; i < len; ++i) tau.push_back(rng.below(std::uint64_t{4}));
    const OmegaString sigma = tau.prefix(rng.below(len + 1));
    const std::uint64_t s = rng.below(std::uint64_t{200});
    const std::uint64_t t = s + rng.below(std::uint64_t{200});
    EXPECT_TRUE(is_bit_prefix(gamma_output(g, sigma, t), gamma_output(g, tau, t)));
    EXPECT_TRUE(is_bit_prefix(gamma_output(g, tau, s), gamma_output(g, tau, t)));
  }
}

TEST(PrefixFree, EliasGamma) {
  EXPECT_EQ(elias_gamma(1), "1");
  EXPECT_EQ(elias_gamma(5), "00101");
  const BitString bits = elias_gamma(9) + elias_gamma(2);
  std::size_t pos = 0;
  EXPECT_EQ(read_elias_gamma(bits, pos), std::optional<std::uint64_t>(9));
  EXPECT_EQ(read_elias_gamma(bits, pos), std::optional<std::uint64_t>(2));
  EXPECT_EQ(pos, bits.size());
}

TEST(PrefixFree, DescriptionsRunAndArePrefixFree) {
  const PrefixFreeMachine m;
  std::vector<BitString> descriptions = {
      PrefixFreeMachine::literal_description(""), PrefixFreeMachine::literal_description("0"),
      PrefixFreeMachine::literal_description("0110"),
      PrefixFreeMachine::repeat_description(3, "01"),
      PrefixFreeMachine::repeat_description(64, "0"),
      PrefixFreeMachine::program_description(ToyProgram::parse("PUSH 1 OUT PUSH 0 HALT"))};
  EXPECT_EQ(m.run(descriptions[3], 100)->output, "010101");
  EXPECT_EQ(m.run(descriptions[5], 100)->output, "1");
  EXPECT_FALSE(m.run(descriptions[4], 10));
  for (std::size_t i = 0; i < descriptions.size(); ++i) {
    for (std::size_t j = 0; j < descriptions.size(); ++j) {
      if (i != j) EXPECT_FALSE(is_bit_prefix(descriptions[i], descriptions[j]));
    }
  }
  EXPECT_FALSE(m.run(descriptions[2] + "0", 100));
  EXPECT_FALSE(m.run(descriptions[2].substr(1), 100));
}

TEST(PrefixFree, KApprox) {
  const PrefixFreeMachine m;
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    BitString x;
    const auto len = rng.below(std::uint64_t{40});
    for (std::uint64_t i = 0; i < len; ++i) x.push_back(rng.below(std::uint64_t{2}) ? '1' : '0');
    EXPECT_LE(m.k_approx(x, 1), x.size() + PrefixFreeMachine::literal_overhead(x.size()));
    std::uint64_t prev = m.k_approx(x, 1);
    for (std::uint64_t t : {2, 8, 32, 128, 4096}) {
      const auto k = m.k_approx(x, t);
      EXPECT_LE(k, prev);
      prev = k;
    }
  }
  EXPECT_LT(m.k_approx(BitString(64, '0'), 1000), 64u);
}

TEST(PrefixFree, HComplexPrefix) {
  const PrefixFreeMachine m;
  const GrowthFn h0 = GrowthFn::pow2_shifted(0);
  const BitString zeros(256, '0');
  EXPECT_TRUE(is_h_complex_prefix(zeros, h0, 10, m, 4096));
  const GrowthFn lin(GrowthFn::Kind::kClosedForm, "4n+1",
                     [](std::size_t n) { return Natural(4 * n + 1); });
  EXPECT_FALSE(is_h_complex_prefix(zeros, lin, 2, m, 4096));
  BitString x;
  Rng rng(8);
  for (int i = 0; i < 256; ++i) x.push_back(rng.below(std::uint64_t{2}) ? '1' : '0');
  for (std::uint64_t c = 0; c < 70; ++c) {
    if (is_h_complex_prefix(x, lin, c, m, 4096)) {
      EXPECT_TRUE(is_h_complex_prefix(x, lin, c + 1, m, 4096));
    }
  }
  EXPECT_TRUE(is_h_complex_prefix(x, lin, 64, m, 4096));
}

}  // namespace
}  // namespace bushy
