#include "bushy/toy_computation.hpp"

namespace bushy {

std::string_view shipped_corpus_text() {
  static constexpr std::string_view kCorpus = R"corpus(
# Shipped enumeration: program e on line e (comments and blank lines skipped).
PUSH 7 HALT
ARG HALT
JMP 0
ARG PUSH 1 ADD HALT
PUSH 0 HALT
ARG ORACLE HALT
ADD HALT
ARG PUSH 2 MOD HALT
ARG DUP JZ 6 PUSH 1 SUB JMP 1 HALT
PUSH 0 READ HALT
ARG PUSH 2 MOD JZ 5 JMP 4 PUSH 3 HALT
ARG PUSH 3 MOD HALT
ARG ARG MUL HALT
PUSH 1 PUSH 2 LT HALT
ARG PUSH 50 MUL DUP JZ 8 PUSH 1 SUB JMP 3 PUSH 5 ADD HALT
PUSH 9 OUT PUSH 2 HALT
PUSH 4 JMP 9
ARG PUSH 5 SUB HALT
ARG PUSH 2 MOD JZ 5 PUSH 1 HALT JMP 5
PUSH 1 JMP 0
ARG PUSH 7 MOD PUSH 1 ADD HALT
ARG PUSH 200 MUL DUP JZ 8 PUSH 1 SUB JMP 3 PUSH 1 ADD HALT
ARG PUSH 4 SUB ORACLE HALT
PUSH 3 PUSH 3 MUL HALT
DUP HALT
ARG PUSH 10 MUL DUP JZ 8 PUSH 1 SUB JMP 3 ARG ADD HALT
ARG PUSH 3 LT JZ 4 HALT PUSH 6 HALT
PUSH 0 JZ 0
ARG PUSH 11 MOD HALT
PUSH 2 ORACLE PUSH 2 ADD HALT
ARG DUP PUSH 1 SUB MUL HALT
ARG PUSH 20 LT JZ 5 PUSH 0 HALT JMP 5
PUSH 12 HALT
ARG PUSH 3 MOD JZ 6 JMP 4 PUSH 0 PUSH 1 HALT
ARG PUSH 2 MUL HALT
SWAP HALT
ARG PUSH 100 MUL DUP JZ 8 PUSH 1 SUB JMP 3 PUSH 2 ADD HALT
PUSH 1 PUSH 0 MOD HALT
ARG ORACLE ARG PUSH 1 ADD ORACLE ADD HALT
JMP 1 HALT
ARG PUSH 13 MOD PUSH 2 MUL HALT
PUSH 5 PUSH 3 SUB HALT
ARG PUSH 5 MOD JZ 6 JMP 4 PUSH 0 PUSH 4 HALT
PUSH 0 PUSH 1 JZ 0 HALT
ARG PUSH 60 MUL DUP JZ 8 PUSH 1 SUB JMP 3 PUSH 3 ADD HALT
ARG PUSH 8 SUB HALT
PUSH 63 ORACLE HALT
DROP HALT
ARG PUSH 2 MOD PUSH 1 ADD HALT
ARG PUSH 1 LT JZ 4 HALT JMP 4
PUSH 31 PUSH 7 MOD HALT
ARG DUP MUL PUSH 17 MOD HALT
PUSH 6 DUP ADD HALT
ARG PUSH 400 MUL DUP JZ 8 PUSH 1 SUB JMP 3 PUSH 4 ADD HALT
PUSH 1 PUSH 1 SWAP SUB HALT
ARG PUSH 7 MOD JZ 6 JMP 4 PUSH 0 PUSH 2 HALT
PUSH 3 HALT
PUSH 2 JMP 3 PUSH 4 JMP 0
ARG PUSH 9 MOD HALT
ARG PUSH 2 SUB ORACLE PUSH 5 ADD HALT
ARG PUSH 30 MUL DUP JZ 8 PUSH 1 SUB JMP 3 PUSH 0 ADD HALT
PUSH 1 HALT
ARG PUSH 6 MOD JZ 5 JMP 4 PUSH 1 HALT
ARG PUSH 1 SUB HALT
)corpus";
  return kCorpus.substr(1);
}

}  // namespace bushy
