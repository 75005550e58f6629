#ifndef LTT_ORACLES_HPP
#define LTT_ORACLES_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltt/dfta.hpp"
#include "ltt/guarded.hpp"
#include "ltt/tree.hpp"
#include "ltt/verdict.hpp"

namespace ltt {

// Every tree with at most max_nodes nodes, exactly once, in
// size-then-lexicographic order.  Definitional ground truth for the
// decision procedures; shares only tree-level code with them.
std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, int max_nodes);

// Exhaustively applies every guard-valid instance of op to every tree with
// at most max_nodes nodes.  Violated on the first membership flip; otherwise
// Holds up to the bound (note says so).
ClosureVerdict brute_closure(const Dfta& a, GuardedOp op, int k, int max_nodes);

// Compares membership across all pairs of enumerated trees that are
// equivalent at kappa.
ClosureVerdict brute_testable(const Dfta& a, int kappa, int max_nodes);

// --- word-language side ---------------------------------------------------

struct WordDfa {
    std::vector<std::string> letters;
    int n_states = 0;
    int initial = 0;
    std::vector<bool> accepting;
    std::vector<std::vector<int>> delta;  // [letter][state] -> state

    int run(const std::vector<int>& word) const {
        int q = initial;
        for (int c : word) q = delta[c][q];
        return q;
    }
    bool accepts(const std::vector<int>& word) const { return accepting[run(word)]; }
};

WordDfa load_word_dfa(const std::string& json_text);
std::string save_word_dfa(const WordDfa& d);

// Transition semigroup of the word automaton on nonempty words.
struct SyntacticSemigroup {
    std::vector<std::vector<int>> elements;   // state maps
    std::vector<std::vector<int>> table;      // table[i][j] = i then j  (element of word u.v with u->i, v->j)
    std::vector<int> letter_element;          // element of each single letter
    std::vector<int> idempotents;

    int multiply(int i, int j) const { return table[i][j]; }
};

SyntacticSemigroup syntactic_semigroup(const WordDfa& d);

// exe = exexe and exeye = eyexe over all idempotents e and elements x, y.
bool lt_equations_hold(const SyntacticSemigroup& s);

// Rank-1 encoding: word a1..an becomes the tree a1(a2(...(bottom))).  The
// returned automaton accepts exactly the encodings of members (reversal +
// subset construction + minimization).
Dfta encode_word_language(const WordDfa& d, const std::string& bottom_symbol = "bot");

Tree encode_word(const std::vector<int>& word, const RankedAlphabet& tree_alphabet);

}  // namespace ltt

#endif
