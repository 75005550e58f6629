#ifndef LTT_TYPED_ANALYSIS_HPP
#define LTT_TYPED_ANALYSIS_HPP

#include <map>
#include <optional>
#include <vector>

#include "ltt/dfta.hpp"
#include "ltt/ktype.hpp"
#include "ltt/verdict.hpp"

namespace ltt {

// (state, root k-type) pairs realized by actual trees.
struct TypedState {
    int state;
    int type_id;
    bool operator<(const TypedState& o) const {
        return state != o.state ? state < o.state : type_id < o.type_id;
    }
    bool operator==(const TypedState& o) const { return state == o.state && type_id == o.type_id; }
};

// Result of the (state, k-type) product fixpoint.  Child slots enter
// transitions only through their "facet": the pair (state, (k-1)-truncation
// of the k-type), so the fixpoint enumerates facet tuples, not tree tuples.
class TypedStateSet {
public:
    TypedStateSet(const Dfta& a, int k, const Budget& budget);

    int k() const { return k_; }
    bool complete() const { return complete_; }
    const KTypeRegistry& types() const { return types_; }
    const std::vector<TypedState>& states() const { return list_; }
    const Tree& witness(int idx) const { return witnesses_.at(idx); }
    std::optional<int> find(int state, int type_id) const;

    // realized (state, (k-1)-trunc shape) pairs, each with a witness tree
    struct Facet {
        int state;
        Tree shape;  // empty for k = 0
        Tree witness;
    };
    const std::vector<Facet>& facets() const { return facets_; }

    // states sharing the given type
    std::vector<int> states_with_type(int type_id) const;

    std::uint64_t explored_steps() const { return steps_; }

private:
    int k_;
    bool complete_ = true;
    KTypeRegistry types_;
    std::vector<TypedState> list_;
    std::vector<Tree> witnesses_;
    std::map<std::pair<int, int>, int> index_;
    std::vector<Facet> facets_;
    std::uint64_t steps_ = 0;
};

// Context behaviors: the function a one-hole context induces.  It factors
// into a state map (total on Q) and a type window: the context truncated at
// depth k.  A window without a port acts as a constant type; otherwise the
// image type is truncate(graft(window, tau), k).  Composition closure of the
// single-node behaviors, identity included.
class BehaviorSet {
public:
    BehaviorSet(const Dfta& a, const TypedStateSet& ts, const Budget& budget);

    struct Behavior {
        std::vector<int> state_map;
        Tree window;
        bool has_port;
        int outer = -1, inner = -1;  // composition provenance; -1,-1 for generators
        Tree elementary;             // generator context, when outer < 0
        int principal_depth = 0;     // length of the root-to-port path of the witness
    };

    bool complete() const { return complete_; }
    const std::vector<Behavior>& behaviors() const { return list_; }
    std::size_t size() const { return list_.size(); }

    // image type id of tau under behavior b, interning new shapes
    int apply_type(const Behavior& b, int type_id);
    // full typed-state application (spec view of ContextBehavior)
    std::optional<TypedState> apply(int behavior_idx, const TypedState& in);

    // concrete witness context realizing behavior i
    Tree witness_context(int behavior_idx) const;

    const TypedStateSet& typed_states() const { return ts_; }
    std::uint64_t explored_steps() const { return steps_; }

private:
    const TypedStateSet& ts_;
    KTypeRegistry types_;  // copy of the typed-state registry; ids coincide
    bool complete_ = true;
    std::vector<Behavior> list_;
    std::uint64_t steps_ = 0;
};

// Is there a tree over the alphabet extended with hole leaves (each used
// exactly once) accepted under assignment A but not under B, or vice versa?
struct HolesResult {
    bool distinguishable = false;
    bool complete = true;  // false when the budget cut the search
    Tree context;          // hole-marked tree, when distinguishable
};
HolesResult holes_distinguishable(const Dfta& a, int holes, const std::vector<int>& assign_a,
                                  const std::vector<int>& assign_b,
                                  std::uint64_t max_steps = 50u * 1000 * 1000);

// Substitute per-hole subtrees into a hole-marked tree; returns the tree and
// the path of each hole.
std::pair<Tree, std::vector<NodePath>> fill_holes(const Tree& marked,
                                                  const std::vector<Tree>& subs);

}  // namespace ltt

#endif
