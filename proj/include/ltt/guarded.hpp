#ifndef LTT_GUARDED_HPP
#define LTT_GUARDED_HPP

#include <string>
#include <vector>

#include "ltt/tree.hpp"

namespace ltt {

enum class GuardedOp { HSwap, HTransfer, VSwap, VStutter };

std::string to_string(GuardedOp op);
GuardedOp guarded_op_from_string(const std::string& s);

struct GuardError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Applies one guarded operation at the designated nodes and returns the
// rewritten tree; the input is not modified.
//
//   HSwap:     nodes = {x, x'}   unrelated; exchanges the two subtrees
//   HTransfer: nodes = {x, y, z} pairwise unrelated, t|x = t|y;
//              replaces t|y with a copy of t|z
//   VSwap:     nodes = {x, y, z} x anc of y anc of z; swaps the context
//              between x,y with the context between y,z
//   VStutter:  nodes = {x, y, z} as VSwap with t[x,y] = t[y,z];
//              removes the context between x and y
//
// With check_guard, all designated nodes must have equal k-types.
Tree apply_guarded(GuardedOp op, const Tree& t, const std::vector<NodePath>& nodes, int k,
                   bool check_guard = true);

}  // namespace ltt

#endif
