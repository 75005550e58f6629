#ifndef LTT_TESTS_ACCEPTANCE_UTIL_HPP
#define LTT_TESTS_ACCEPTANCE_UTIL_HPP

#include <functional>
#include <random>
#include <set>
#include <vector>

#include "ltt/ktype.hpp"
#include "ltt/tree.hpp"

namespace ltt_tests {

using namespace ltt;

inline Tree random_tree(const RankedAlphabet& alphabet, int max_nodes, std::mt19937_64& rng) {
    std::vector<int> nullary, rest;
    for (int s = 0; s < alphabet.size(); ++s)
        (alphabet.arity(s) == 0 ? nullary : rest).push_back(s);
    std::function<Tree(int)> gen = [&](int budget) -> Tree {
        if (budget <= 1 || rest.empty() || (rng() % 3 == 0))
            return make_node(nullary[rng() % nullary.size()]);
        int s = rest[rng() % rest.size()];
        std::vector<Tree> kids;
        for (int i = 0; i < alphabet.arity(s); ++i)
            kids.push_back(gen(std::max(1, (budget - 1) / alphabet.arity(s))));
        return make_node(s, std::move(kids));
    };
    return gen(max_nodes);
}

inline std::vector<NodePath> all_paths(const Tree& t) {
    std::vector<NodePath> out;
    std::function<void(const Tree&, NodePath&)> walk = [&](const Tree& node, NodePath& path) {
        out.push_back(path);
        for (std::size_t i = 0; i < node->children.size(); ++i) {
            path.push_back(static_cast<int>(i));
            walk(node->children[i], path);
            path.pop_back();
        }
    };
    NodePath p;
    walk(t, p);
    return out;
}

// exhaustive enumeration of k-type shapes, independent of count_ktypes
inline std::set<std::string> enumerate_type_shapes(const RankedAlphabet& alphabet, int k) {
    std::function<std::vector<Tree>(int)> enumerate = [&](int depth) -> std::vector<Tree> {
        std::vector<Tree> out;
        if (depth == 0) {
            for (int s = 0; s < alphabet.size(); ++s) out.push_back(make_node(s));
            return out;
        }
        std::vector<Tree> child_shapes = enumerate(depth - 1);
        for (int s = 0; s < alphabet.size(); ++s) {
            int ar = alphabet.arity(s);
            std::vector<int> idx(ar, 0);
            while (true) {
                std::vector<Tree> kids;
                for (int i = 0; i < ar; ++i) kids.push_back(child_shapes[idx[i]]);
                out.push_back(make_node(s, std::move(kids)));
                int pos = ar - 1;
                while (pos >= 0 && ++idx[pos] == static_cast<int>(child_shapes.size())) idx[pos--] = 0;
                if (pos < 0) break;
            }
        }
        return out;
    };
    std::set<std::string> keys;
    for (const auto& sh : enumerate(k)) keys.insert(shape_key(sh));
    return keys;
}

}  // namespace ltt_tests

#endif
