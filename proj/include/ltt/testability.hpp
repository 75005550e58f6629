#ifndef LTT_TESTABILITY_HPP
#define LTT_TESTABILITY_HPP

#include <map>
#include <optional>
#include <vector>

#include "ltt/dfta.hpp"
#include "ltt/ktype.hpp"
#include "ltt/verdict.hpp"

namespace ltt {

// Deterministic bottom-up evaluator computing each node's occurrence data:
// the node's kappa-type together with the set of kappa-types occurring in
// its subtree.  States are interned on demand; the transition function is
// computed lazily, never tabulated.
class OccurrenceAutomaton {
public:
    OccurrenceAutomaton(RankedAlphabet alphabet, int kappa);

    int kappa() const { return kappa_; }
    const KTypeRegistry& types() const { return types_; }
    KTypeRegistry& types_mut() { return types_; }

    struct State {
        int root_type;
        std::vector<int> occ;  // sorted type ids; contains root_type
    };
    const State& state(int id) const { return states_.at(id); }
    int n_states() const { return static_cast<int>(states_.size()); }

    // transition on interned states
    int transition(int symbol, const std::vector<int>& child_states);
    // root-type part only: the kappa-type of a node from its children's types
    int type_transition(int symbol, const std::vector<int>& child_root_types);
    // evaluate a whole tree (DAG-safe)
    int eval(const Tree& t);

private:
    int intern(int root_type, std::vector<int> occ);

    RankedAlphabet alphabet_;
    int kappa_;
    KTypeRegistry types_;
    std::vector<State> states_;
    std::map<std::pair<int, std::vector<int>>, int> index_;
    std::map<std::pair<int, std::vector<int>>, int> type_memo_;
};

// Is the language a union of equivalence classes at kappa?  Product of the
// automaton with the occurrence evaluator, restricted to co-reachable
// language states, plus a per-datum search for differently-accepted trees
// within the datum's own type support.  Violated carries a witness pair
// (member, non-member), equivalent at kappa.
ClosureVerdict is_kappa_testable(const Dfta& a, int kappa, const Budget& budget = {});

// beta_k + k + 1
BigUint kappa_bound(const Dfta& a, int k);

struct DecideLtLimits {
    int max_kappa = 3;     // testability scan ceiling
    int tame_scan_max = 3; // small-k tameness scan ceiling
    Budget budget;
};

LtVerdict decide_lt(const Dfta& a, const DecideLtLimits& limits = {});

}  // namespace ltt

#endif
