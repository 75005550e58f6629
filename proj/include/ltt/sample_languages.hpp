#ifndef LTT_SAMPLE_LANGUAGES_HPP
#define LTT_SAMPLE_LANGUAGES_HPP

#include "ltt/dfta.hpp"
#include "ltt/oracles.hpp"

namespace ltt {

// All-accepting / none-accepting automata over the given alphabet.
Dfta make_universal(const RankedAlphabet& alphabet);
Dfta make_empty(const RankedAlphabet& alphabet);

// Trees over {a:2, b:0, c:0} with an even number of b leaves.
Dfta make_even_b();

// Root pair automaton over {a:2, b:0, c:0}: state tracks (own b-parity,
// b-parity of the left child); accepts when the left subtree has even b.
Dfta make_left_even_b();

// The tame-but-not-LT language: a root with three unary string branches,
// two of them in b*cd*, one in b*c'd*, leaf labels {h1,h2,h3} all distinct.
// Symbols: a:3, b:1, c:1, cp:1, d:1, h1:0, h2:0, h3:0.
Dfta make_three_branch_language();
Tree make_three_branch_member(int pad, int cp_branch = 2);  // b^pad (c|cp) d^pad branches

// Curated word languages over <= 2 letters with <= 4 DFA states.
struct NamedWordLanguage {
    std::string name;
    WordDfa dfa;
    bool locally_testable;  // known classification, used by the word bridge
};
std::vector<NamedWordLanguage> word_language_suite();

}  // namespace ltt

#endif
