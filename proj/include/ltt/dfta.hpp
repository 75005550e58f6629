#ifndef LTT_DFTA_HPP
#define LTT_DFTA_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ltt/tree.hpp"

namespace ltt {

// Deterministic bottom-up tree automaton with a total transition map.
// delta is stored flat per symbol: for arity r the entry for children
// (q_0,...,q_{r-1}) sits at index sum q_i * n^(r-1-i).
class Dfta {
public:
    Dfta() = default;
    Dfta(RankedAlphabet alphabet, int n_states, std::vector<bool> final_states,
         std::vector<std::vector<int>> delta);

    const RankedAlphabet& alphabet() const { return alphabet_; }
    int n_states() const { return n_states_; }
    bool is_final(int q) const { return final_.at(q); }
    const std::vector<bool>& final_states() const { return final_; }

    int delta(int symbol, const std::vector<int>& children) const;
    const std::vector<std::vector<int>>& delta_tables() const { return delta_; }

    std::size_t delta_index(int symbol, const std::vector<int>& children) const;

    int run(const Tree& t) const;
    bool accepts(const Tree& t) const { return is_final(run(t)); }

private:
    RankedAlphabet alphabet_;
    int n_states_ = 0;
    std::vector<bool> final_;
    std::vector<std::vector<int>> delta_;  // per symbol, flat
};

// Reachability with minimal-size witness trees.
struct Reachability {
    std::vector<bool> reachable;
    std::vector<Tree> witness;  // empty Tree for unreachable states
    std::vector<int> states() const;
};
Reachability reachable_states(const Dfta& a);

// States from which some one-hole context leads to a final state.
std::vector<bool> coreachable_states(const Dfta& a, const Reachability& reach);

bool is_empty(const Dfta& a);

Dfta product(const Dfta& a, const Dfta& b, const std::function<bool(bool, bool)>& combine);
Dfta complement(const Dfta& a);
bool equivalent(const Dfta& a, const Dfta& b);

Dfta minimize(const Dfta& a);

// One-hole context C with accepts(C[q1]) != accepts(C[q2]), if any.  Side
// slots are filled with reachability witnesses.
std::optional<Tree> separating_context(const Dfta& a, int q1, int q2);

Dfta random_dfta(const RankedAlphabet& alphabet, int n_states, std::uint64_t seed);

// File format: {"alphabet":[{"symbol","arity"}],"states":[...],"final":[...],
// "delta":[{"symbol","children","to"}]}.  complete_with_sink fills missing
// transitions with a fresh non-final sink.
Dfta load_dfta(const std::string& json_text, bool complete_with_sink = false);
std::string save_dfta(const Dfta& a);

}  // namespace ltt

#endif
