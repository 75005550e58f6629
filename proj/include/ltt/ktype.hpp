#ifndef LTT_KTYPE_HPP
#define LTT_KTYPE_HPP

#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "ltt/bigint.hpp"
#include "ltt/tree.hpp"

namespace ltt {

// Depth-k neighborhood type of a node: the subtree truncated at depth k.
// Canonical form is the truncated tree itself; equality is structural.
struct KType {
    int k = 0;
    Tree shape;

    bool operator==(const KType& other) const {
        return k == other.k && tree_equal(shape, other.shape);
    }
};

// Truncation at depth d: nodes at depth d lose their children.  A port is
// an ordinary leaf: it survives if within depth d and disappears with the
// cut otherwise, which is what context windows need.
Tree truncate(const Tree& t, int d);

// Do a and b agree on their depth-d truncations?  Memoized over shared
// nodes, safe for deep DAG-shaped witnesses.
bool truncations_equal(const Tree& a, const Tree& b, int d);

KType ktype_of(const Tree& t, const NodePath& x, int k);

// Interning registry so type-indexed maps can use small ints.  Ids are
// assigned in insertion order; deterministic given the fixpoint order.
class KTypeRegistry {
public:
    explicit KTypeRegistry(int k) : k_(k) {}
    int k() const { return k_; }
    int intern(const Tree& shape);
    const Tree& shape(int id) const { return shapes_.at(id); }
    int size() const { return static_cast<int>(shapes_.size()); }

private:
    int k_;
    std::vector<Tree> shapes_;
    std::unordered_map<std::string, int> by_key_;
};

// Canonical string key of a shape (labels are ids; port as '_').
std::string shape_key(const Tree& shape);

std::set<std::string> occurrence_keys(const Tree& t, int k);
std::vector<KType> occurrence_set(const Tree& t, int k);

// Same root k-type and same sets of occurring k-types.
bool equiv_k(const Tree& t1, const Tree& t2, int k);

// Number of k-type shapes over the alphabet: f(0) = |Sigma|,
// f(j+1) = sum over symbols of f(j)^arity.
BigUint count_ktypes(const RankedAlphabet& alphabet, int k);

}  // namespace ltt

#endif
