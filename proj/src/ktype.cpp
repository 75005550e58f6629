#include "ltt/ktype.hpp"

#include <algorithm>

namespace ltt {

namespace {

struct NodeDepthHash {
    std::size_t operator()(const std::pair<const TreeNode*, int>& p) const {
        return std::hash<const TreeNode*>()(p.first) * 1000003u ^ std::hash<int>()(p.second);
    }
};

Tree truncate_memo(const Tree& t, int d,
                   std::unordered_map<std::pair<const TreeNode*, int>, Tree, NodeDepthHash>& memo) {
    auto key = std::make_pair(t.get(), d);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    Tree result;
    if (d == 0) {
        result = t->children.empty() ? t : make_node(t->label);
    } else {
        std::vector<Tree> kids;
        kids.reserve(t->children.size());
        bool changed = false;
        for (const auto& c : t->children) {
            Tree tc = truncate_memo(c, d - 1, memo);
            changed = changed || tc.get() != c.get();
            kids.push_back(std::move(tc));
        }
        result = changed ? make_node(t->label, std::move(kids)) : t;
    }
    memo[key] = result;
    return result;
}

struct TruncEqKey {
    const TreeNode* a;
    const TreeNode* b;
    int d;
    bool operator==(const TruncEqKey& o) const { return a == o.a && b == o.b && d == o.d; }
};
struct TruncEqHash {
    std::size_t operator()(const TruncEqKey& k) const {
        std::size_t h = std::hash<const TreeNode*>()(k.a);
        h = h * 1000003u ^ std::hash<const TreeNode*>()(k.b);
        h = h * 1000003u ^ std::hash<int>()(k.d);
        return h;
    }
};

bool trunc_equal_memo(const Tree& a, const Tree& b, int d,
                      std::unordered_map<TruncEqKey, bool, TruncEqHash>& memo) {
    if (a.get() == b.get()) return true;
    if (a->label != b->label) return false;
    if (d == 0) return true;
    if (a->children.size() != b->children.size()) return false;
    TruncEqKey key{a.get(), b.get(), d};
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    bool eq = true;
    for (std::size_t i = 0; i < a->children.size() && eq; ++i)
        eq = trunc_equal_memo(a->children[i], b->children[i], d - 1, memo);
    memo[key] = eq;
    return eq;
}

void shape_key_rec(const Tree& t, std::string& out) {
    if (t->label == kPortLabel)
        out += '_';
    else if (is_hole_label(t->label))
        out += "_" + std::to_string(hole_index(t->label) + 1);
    else
        out += std::to_string(t->label);
    if (!t->children.empty()) {
        out += '(';
        for (std::size_t i = 0; i < t->children.size(); ++i) {
            if (i) out += ',';
            shape_key_rec(t->children[i], out);
        }
        out += ')';
    }
}

void occurrence_rec(const Tree& t, int k, std::set<std::string>& out,
                    std::set<const TreeNode*>& visited) {
    if (!visited.insert(t.get()).second) return;
    out.insert(shape_key(truncate(t, k)));
    for (const auto& c : t->children) occurrence_rec(c, k, out, visited);
}

}  // namespace

Tree truncate(const Tree& t, int d) {
    std::unordered_map<std::pair<const TreeNode*, int>, Tree, NodeDepthHash> memo;
    return truncate_memo(t, d, memo);
}

bool truncations_equal(const Tree& a, const Tree& b, int d) {
    std::unordered_map<TruncEqKey, bool, TruncEqHash> memo;
    return trunc_equal_memo(a, b, d, memo);
}

KType ktype_of(const Tree& t, const NodePath& x, int k) {
    if (k < 0) throw std::invalid_argument("ktype_of: k must be >= 0");
    return KType{k, truncate(subtree_at(t, x), k)};
}

int KTypeRegistry::intern(const Tree& shape) {
    std::string key = shape_key(shape);
    auto it = by_key_.find(key);
    if (it != by_key_.end()) return it->second;
    int id = static_cast<int>(shapes_.size());
    shapes_.push_back(shape);
    by_key_.emplace(std::move(key), id);
    return id;
}

std::string shape_key(const Tree& shape) {
    std::string out;
    shape_key_rec(shape, out);
    return out;
}

std::set<std::string> occurrence_keys(const Tree& t, int k) {
    std::set<std::string> out;
    std::set<const TreeNode*> visited;
    occurrence_rec(t, k, out, visited);
    return out;
}

std::vector<KType> occurrence_set(const Tree& t, int k) {
    // collect distinct shapes; keys give canonical dedup and a stable order
    std::set<std::string> keys;
    std::vector<KType> out;
    std::vector<std::pair<const TreeNode*, Tree>> stack{{t.get(), t}};
    std::set<const TreeNode*> visited;
    while (!stack.empty()) {
        auto [ptr, node] = stack.back();
        stack.pop_back();
        if (!visited.insert(ptr).second) continue;
        Tree shape = truncate(node, k);
        if (keys.insert(shape_key(shape)).second) out.push_back(KType{k, shape});
        for (const auto& c : node->children) stack.push_back({c.get(), c});
    }
    std::sort(out.begin(), out.end(),
              [](const KType& a, const KType& b) { return shape_key(a.shape) < shape_key(b.shape); });
    return out;
}

bool equiv_k(const Tree& t1, const Tree& t2, int k) {
    if (!truncations_equal(t1, t2, k)) return false;
    return occurrence_keys(t1, k) == occurrence_keys(t2, k);
}

BigUint count_ktypes(const RankedAlphabet& alphabet, int k) {
    if (k < 0) throw std::invalid_argument("count_ktypes: k must be >= 0");
    BigUint f(static_cast<std::uint64_t>(alphabet.size()));
    for (int j = 0; j < k; ++j) {
        BigUint next(0);
        for (const auto& sym : alphabet.symbols())
            next = next + BigUint::pow(f, static_cast<std::uint64_t>(sym.arity));
        f = next;
    }
    return f;
}

}  // namespace ltt
