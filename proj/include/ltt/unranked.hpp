#ifndef LTT_UNRANKED_HPP
#define LTT_UNRANKED_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ltt/bigint.hpp"
#include "ltt/verdict.hpp"

namespace ltt {

// Unranked unordered trees in canonical form: children sorted by the
// structural order, equality is multiset equality.
struct UnrankedNode {
    int label;
    std::vector<UnrankedTree> children;  // sorted by unranked_compare
};

int unranked_compare(const UnrankedTree& a, const UnrankedTree& b);
bool unranked_equal(const UnrankedTree& a, const UnrankedTree& b);
UnrankedTree make_unode(int label, std::vector<UnrankedTree> children = {});
std::uint64_t unranked_size(const UnrankedTree& t);
int unranked_depth(const UnrankedTree& t);

struct UnrankedAlphabet {
    std::vector<std::string> symbols;
    std::optional<int> find(const std::string& name) const;
    int size() const { return static_cast<int>(symbols.size()); }
    bool operator==(const UnrankedAlphabet& o) const { return symbols == o.symbols; }
};

constexpr int kUPortLabel = -1;

// Syntax: a{t,...,t}; a leaf may be written bare.  Render emits canonical
// child order; the port prints as '_'.
UnrankedTree parse_unranked(const std::string& text, const UnrankedAlphabet& alphabet,
                            bool allow_port = false);
std::string render_unranked(const UnrankedTree& t, const UnrankedAlphabet& alphabet);

const UnrankedTree& usubtree_at(const UnrankedTree& t, const NodePath& path);
// replacement re-canonicalizes along the path
UnrankedTree ureplace_at(const UnrankedTree& t, const NodePath& path, const UnrankedTree& sub);
std::optional<NodePath> ufind_port(const UnrankedTree& t);
UnrankedTree ugraft(const UnrankedTree& ctx, const UnrankedTree& sub);
UnrankedTree ucontext_between(const UnrankedTree& t, const NodePath& x, const NodePath& y);

// plain unordered truncation equality (multisets compared level by level)
bool utruncations_equal(const UnrankedTree& a, const UnrankedTree& b, int depth);

// (k,l)-types: label plus, per child (k-1,l)-type, the child count capped at
// l.  Interned; ids are only comparable within one registry.
class KLTypeRegistry {
public:
    explicit KLTypeRegistry(int l) : l_(l) {
        if (l < 1) throw std::invalid_argument("kl types: l must be >= 1");
    }
    int l() const { return l_; }

    struct Entry {
        int label;
        std::vector<std::pair<int, int>> counts;  // (child type id, capped count), sorted
    };
    const Entry& entry(int id) const { return entries_.at(id); }
    int size() const { return static_cast<int>(entries_.size()); }

    int intern(int label, std::vector<std::pair<int, int>> counts);
    int type_of(const UnrankedTree& t, int k);
    // drop one level: the (j-1,l)-truncation of a level-j type
    int truncate(int id, int to_level);

private:
    int l_;
    std::vector<Entry> entries_;
    std::map<std::string, int> index_;
    std::map<std::pair<const UnrankedNode*, int>, int> type_memo_;
    std::map<std::pair<int, int>, int> trunc_memo_;
};

int kl_type_of(const UnrankedTree& t, const NodePath& x, int k, int l, KLTypeRegistry& reg);
bool equiv_kl(const UnrankedTree& t1, const UnrankedTree& t2, int k, int l);
std::set<int> kl_occurrence_set(const UnrankedTree& t, int k, KLTypeRegistry& reg);

// f(0) = |Sigma|, f(j+1) = |Sigma| * (l+1)^f(j); throws std::overflow_error
// once the tower no longer fits in memory.
BigUint count_kl_types(int n_symbols, int k, int l);

// --- counting automata --------------------------------------------------

// Deterministic automaton over unranked unordered trees: transitions read,
// per state, the number of children in that state up to threshold m.
class CountingDfta {
public:
    CountingDfta() = default;
    CountingDfta(UnrankedAlphabet alphabet, int n_states, int m, std::vector<bool> final_states,
                 std::vector<std::vector<int>> delta);

    const UnrankedAlphabet& alphabet() const { return alphabet_; }
    int n_states() const { return n_states_; }
    int threshold() const { return m_; }
    bool is_final(int q) const { return final_.at(q); }

    // profile = per-state child counts capped at m, encoded base (m+1)
    std::size_t profile_index(const std::vector<int>& counts) const;
    std::vector<int> profile_of_children(const std::vector<int>& child_states) const;
    int delta(int symbol, const std::vector<int>& profile_counts) const;
    int delta_index(int symbol, std::size_t profile_idx) const { return delta_[symbol][profile_idx]; }
    std::size_t profile_count() const;

    int run(const UnrankedTree& t) const;
    bool accepts(const UnrankedTree& t) const { return is_final(run(t)); }

    const std::vector<std::vector<int>>& delta_tables() const { return delta_; }

private:
    UnrankedAlphabet alphabet_;
    int n_states_ = 0;
    int m_ = 1;
    std::vector<bool> final_;
    std::vector<std::vector<int>> delta_;  // per symbol, indexed by profile
};

struct UReachability {
    std::vector<bool> reachable;
    std::vector<UnrankedTree> witness;
    std::vector<int> states() const;
};
UReachability ureachable_states(const CountingDfta& a);

CountingDfta minimize_counting(const CountingDfta& a);
bool counting_equivalent(const CountingDfta& a, const CountingDfta& b);

std::optional<UnrankedTree> useparating_context(const CountingDfta& a, int q1, int q2);

CountingDfta random_counting_dfta(const UnrankedAlphabet& alphabet, int n_states, int m,
                                  std::uint64_t seed);

// File format: the ranked format plus "m"; transitions carry a profile:
// [{"state": id, "constraint": "=0".."=m-1" | ">=m"}], omitted states mean =0.
CountingDfta load_counting_dfta(const std::string& json_text, bool complete_with_sink = false);
std::string save_counting_dfta(const CountingDfta& a);

// --- guarded operations and closure checks --------------------------------

// HStutter duplicates the subtree at the single designated node (which must
// not be the root); the other operations mirror the ranked ones with
// (k,l)-type guards.
UnrankedTree apply_unranked_op(UOp op, const UnrankedTree& t, const std::vector<NodePath>& nodes,
                               int k, int l, bool check_guard = true);

bool ureplay_flips(const CountingDfta& a, const UOpInstance& w);

ClosureVerdict closed_under_kl_guarded(UOp op, const CountingDfta& a, int k, int l,
                                       const Budget& budget = {});
ClosureVerdict is_kl_tame(const CountingDfta& a, int k, int l, const Budget& budget = {});

ClosureVerdict is_kl_testable(const CountingDfta& a, int kappa, int lambda,
                              const Budget& budget = {});

struct DecideUnrankedLimits {
    int max_kappa = 2;
    int max_lambda = 3;
    int tame_scan_max = 2;
    Budget budget;
};

LtVerdict decide_ilt(const CountingDfta& a, const DecideUnrankedLimits& limits = {});
LtVerdict decide_alt(const CountingDfta& a, const DecideUnrankedLimits& limits = {});

// --- desk-scale oracles ----------------------------------------------------

std::vector<UnrankedTree> enumerate_unranked_trees(int n_symbols, int max_nodes);
ClosureVerdict brute_hstutter(const CountingDfta& a, int max_nodes);
ClosureVerdict brute_kl_closure(const CountingDfta& a, UOp op, int k, int l, int max_nodes);
ClosureVerdict brute_kl_testable(const CountingDfta& a, int kappa, int lambda, int max_nodes);

}  // namespace ltt

#endif
