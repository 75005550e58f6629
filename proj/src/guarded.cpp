#include "ltt/guarded.hpp"

#include "ltt/ktype.hpp"

namespace ltt {

std::string to_string(GuardedOp op) {
    switch (op) {
        case GuardedOp::HSwap: return "hswap";
        case GuardedOp::HTransfer: return "htransfer";
        case GuardedOp::VSwap: return "vswap";
        case GuardedOp::VStutter: return "vstutter";
    }
    return "?";
}

GuardedOp guarded_op_from_string(const std::string& s) {
    if (s == "hswap") return GuardedOp::HSwap;
    if (s == "htransfer") return GuardedOp::HTransfer;
    if (s == "vswap") return GuardedOp::VSwap;
    if (s == "vstutter") return GuardedOp::VStutter;
    throw std::invalid_argument("unknown guarded operation '" + s + "'");
}

namespace {

void check_types_equal(const Tree& t, const std::vector<NodePath>& nodes, int k) {
    const Tree& first = subtree_at(t, nodes[0]);
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!truncations_equal(first, subtree_at(t, nodes[i]), k))
            throw GuardError("guard violated: nodes do not share a " + std::to_string(k) + "-type");
}

}  // namespace

Tree apply_guarded(GuardedOp op, const Tree& t, const std::vector<NodePath>& nodes, int k,
                   bool check_guard) {
    std::size_t want = op == GuardedOp::HSwap ? 2 : 3;
    if (nodes.size() != want)
        throw GuardError(to_string(op) + " expects " + std::to_string(want) + " nodes");

    switch (op) {
        case GuardedOp::HSwap: {
            const NodePath &x = nodes[0], &xp = nodes[1];
            if (!paths_unrelated(x, xp))
                throw GuardError("hswap: nodes must not be related by the descendant relation");
            if (check_guard) check_types_equal(t, nodes, k);
            Tree sx = subtree_at(t, x);
            Tree sxp = subtree_at(t, xp);
            return replace_at(replace_at(t, x, sxp), xp, sx);
        }
        case GuardedOp::HTransfer: {
            const NodePath &x = nodes[0], &y = nodes[1], &z = nodes[2];
            if (!paths_unrelated(x, y) || !paths_unrelated(y, z) || !paths_unrelated(x, z))
                throw GuardError("htransfer: nodes must be pairwise unrelated");
            if (!tree_equal(subtree_at(t, x), subtree_at(t, y)))
                throw GuardError("htransfer: subtrees at x and y differ");
            if (check_guard) check_types_equal(t, nodes, k);
            return replace_at(t, y, subtree_at(t, z));
        }
        case GuardedOp::VSwap: {
            const NodePath &x = nodes[0], &y = nodes[1], &z = nodes[2];
            if (!path_is_prefix(x, y) || !path_is_prefix(y, z))
                throw GuardError("vswap: expected x ancestor of y ancestor of z");
            if (check_guard) check_types_equal(t, nodes, k);
            Tree d1 = context_between(t, x, y);
            Tree d2 = context_between(t, y, z);
            Tree sub = subtree_at(t, z);
            return replace_at(t, x, graft(d2, graft(d1, sub)));
        }
        case GuardedOp::VStutter: {
            const NodePath &x = nodes[0], &y = nodes[1], &z = nodes[2];
            if (!path_is_prefix(x, y) || !path_is_prefix(y, z))
                throw GuardError("vstutter: expected x ancestor of y ancestor of z");
            Tree d1 = context_between(t, x, y);
            Tree d2 = context_between(t, y, z);
            if (!tree_equal(d1, d2)) throw GuardError("vstutter: contexts t[x,y] and t[y,z] differ");
            if (check_guard) check_types_equal(t, nodes, k);
            return replace_at(t, x, graft(d1, subtree_at(t, z)));
        }
    }
    throw GuardError("unreachable");
}

}  // namespace ltt
