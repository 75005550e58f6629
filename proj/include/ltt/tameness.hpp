#ifndef LTT_TAMENESS_HPP
#define LTT_TAMENESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "ltt/dfta.hpp"
#include "ltt/typed_analysis.hpp"
#include "ltt/verdict.hpp"

namespace ltt {

// Which state pairs are realized by two trees sharing a k-type?  The level
// sets R_0 over R_1 over ... (R_j = pairs realized by trees agreeing on
// their depth-j truncations) form a descending chain that stabilizes within
// |Q|^2 steps, so membership is computable for any k.  Witness tree pairs
// are rebuilt on demand, reusing diagonal (equal-tree) children wherever a
// derivation allows.
class SharedTypePairs {
public:
    SharedTypePairs(const Dfta& a, int k, std::uint64_t max_steps);

    bool computed() const { return computed_; }
    const std::set<std::pair<int, int>>& pairs() const { return levels_.back(); }

    // trees (t1, t2) with run t1 = q1, run t2 = q2, agreeing to depth k
    std::pair<Tree, Tree> witness(int q1, int q2, std::uint64_t max_nodes);

    std::uint64_t explored_steps() const { return steps_; }

private:
    struct Deriv {
        int symbol = -1;
        std::vector<std::pair<int, int>> children;
        int cost = 0;  // number of non-diagonal children
    };
    using Level = std::set<std::pair<int, int>>;
    using DerivMap = std::map<std::pair<int, int>, Deriv>;

    std::pair<Tree, Tree> witness_at(int q1, int q2, int depth);

    const Dfta& a_;
    int k_;
    bool computed_ = true;
    std::vector<Level> levels_;      // levels_[j] = R_j, j = 0..last
    std::vector<DerivMap> derivs_;   // derivations per level (children one level down)
    DerivMap derivs_fix_;            // self-supporting derivations once stable
    int stable_at_ = -1;             // first j with R_{j+1} = R_j, if reached
    Reachability reach_;
    std::uint64_t steps_ = 0;
    std::map<std::tuple<int, int, int>, std::pair<Tree, Tree>> wmemo_;
    std::uint64_t built_nodes_ = 0;
};

// Closure of the language under one k-guarded operation, decided on the
// minimized automaton at the state level.  Horizontal operations are decided
// exactly at any k; vertical operations are decided exactly while the typed
// fixpoints fit the budget and fall back to a sound violation search built
// from deep context powers (whose guard types stabilize) otherwise.
ClosureVerdict closed_under_guarded(GuardedOp op, const Dfta& a, int k, const Budget& budget = {});

// Conjunction over the four operations; Violated carries the first witness.
ClosureVerdict is_k_tame(const Dfta& a, int k, const Budget& budget = {});

// |A|^3 + 1 for the minimized automaton.
std::int64_t tameness_bound_k0(const Dfta& a);

struct TameResult {
    ClosureVerdict verdict;
    std::optional<int> certified_k;  // k at which Holds was certified
    std::int64_t k0 = 0;
};

// Tame iff k0-tame; a Holds at a smaller k short-circuits by monotonicity,
// a violation counts only at k0.
TameResult is_tame(const Dfta& a, const Budget& budget = {});

// Replays a witness instance; true iff membership flips.
bool replay_flips(const Dfta& a, const OpInstance& w);

}  // namespace ltt

#endif
