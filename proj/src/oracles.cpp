#include "ltt/oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include <json.hpp>

#include "ltt/ktype.hpp"

namespace ltt {

namespace {

// all trees with exactly n nodes, in lexicographic order per size class
std::vector<Tree> trees_of_size(const RankedAlphabet& alphabet, int n,
                                std::map<int, std::vector<Tree>>& memo) {
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    std::vector<Tree> out;
    for (int s = 0; s < alphabet.size(); ++s) {
        int ar = alphabet.arity(s);
        if (ar == 0) {
            if (n == 1) out.push_back(make_node(s));
            continue;
        }
        if (n < 1 + ar) continue;
        // distribute n-1 nodes over ar children
        std::vector<std::vector<Tree>> parts(ar);
        std::function<void(int, int, std::vector<Tree>&)> assemble =
            [&](int child, int left, std::vector<Tree>& kids) {
                if (child == ar) {
                    if (left == 0) out.push_back(make_node(s, kids));
                    return;
                }
                int remaining_children = ar - child - 1;
                for (int take = 1; take + remaining_children <= left; ++take) {
                    for (const auto& sub : trees_of_size(alphabet, take, memo)) {
                        kids.push_back(sub);
                        assemble(child + 1, left - take, kids);
                        kids.pop_back();
                    }
                }
            };
        std::vector<Tree> kids;
        assemble(0, n - 1, kids);
    }
    memo[n] = out;
    return out;
}

std::vector<NodePath> node_paths(const Tree& t) {
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

}  // namespace

std::vector<Tree> enumerate_trees(const RankedAlphabet& alphabet, int max_nodes) {
    if (max_nodes < 1) throw std::invalid_argument("enumerate_trees: max_nodes must be >= 1");
    std::map<int, std::vector<Tree>> memo;
    std::vector<Tree> out;
    for (int n = 1; n <= max_nodes; ++n)
        for (const auto& t : trees_of_size(alphabet, n, memo)) out.push_back(t);
    return out;
}

ClosureVerdict brute_closure(const Dfta& a, GuardedOp op, int k, int max_nodes) {
    ClosureVerdict verdict;
    std::uint64_t instances = 0;
    for (const auto& t : enumerate_trees(a.alphabet(), max_nodes)) {
        bool in = a.accepts(t);
        auto paths = node_paths(t);
        std::size_t m = paths.size();

        // cheap validity filters first; apply_guarded re-validates
        auto guard_ok = [&](const std::vector<NodePath>& nodes) {
            const Tree& first = subtree_at(t, nodes[0]);
            for (std::size_t i = 1; i < nodes.size(); ++i)
                if (!truncations_equal(first, subtree_at(t, nodes[i]), k)) return false;
            return true;
        };
        auto flip = [&](const std::vector<NodePath>& nodes) -> bool {
            ++instances;
            Tree t2 = apply_guarded(op, t, nodes, k, true);
            if (a.accepts(t2) != in) {
                verdict.status = Status::Violated;
                verdict.witness = OpInstance{op, t, nodes, k};
                return true;
            }
            return false;
        };

        bool found = false;
        if (op == GuardedOp::HSwap) {
            for (std::size_t i = 0; i < m && !found; ++i)
                for (std::size_t j = 0; j < m && !found; ++j) {
                    if (i == j || !paths_unrelated(paths[i], paths[j])) continue;
                    if (!guard_ok({paths[i], paths[j]})) continue;
                    found = flip({paths[i], paths[j]});
                }
        } else if (op == GuardedOp::HTransfer) {
            for (std::size_t i = 0; i < m && !found; ++i)
                for (std::size_t j = 0; j < m && !found; ++j) {
                    if (i == j || !paths_unrelated(paths[i], paths[j])) continue;
                    if (!tree_equal(subtree_at(t, paths[i]), subtree_at(t, paths[j]))) continue;
                    for (std::size_t l = 0; l < m && !found; ++l) {
                        if (l == i || l == j || !paths_unrelated(paths[i], paths[l]) ||
                            !paths_unrelated(paths[j], paths[l]))
                            continue;
                        if (!guard_ok({paths[i], paths[j], paths[l]})) continue;
                        found = flip({paths[i], paths[j], paths[l]});
                    }
                }
        } else {
            for (std::size_t i = 0; i < m && !found; ++i)
                for (std::size_t j = 0; j < m && !found; ++j) {
                    if (!path_is_prefix(paths[i], paths[j])) continue;
                    for (std::size_t l = 0; l < m && !found; ++l) {
                        if (!path_is_prefix(paths[j], paths[l])) continue;
                        if (op == GuardedOp::VStutter &&
                            !tree_equal(context_between(t, paths[i], paths[j]),
                                        context_between(t, paths[j], paths[l])))
                            continue;
                        if (!guard_ok({paths[i], paths[j], paths[l]})) continue;
                        found = flip({paths[i], paths[j], paths[l]});
                    }
                }
        }
        if (found) {
            verdict.explored["instances"] = instances;
            return verdict;
        }
    }
    verdict.status = Status::Holds;
    verdict.note = "holds-up-to-bound max_nodes=" + std::to_string(max_nodes);
    verdict.explored["instances"] = instances;
    return verdict;
}

ClosureVerdict brute_testable(const Dfta& a, int kappa, int max_nodes) {
    ClosureVerdict verdict;
    auto trees = enumerate_trees(a.alphabet(), max_nodes);
    // bucket by (root kappa-type, occurrence keys)
    std::map<std::pair<std::string, std::set<std::string>>, std::pair<const Tree*, bool>> buckets;
    for (const auto& t : trees) {
        auto key = std::make_pair(shape_key(truncate(t, kappa)), occurrence_keys(t, kappa));
        bool in = a.accepts(t);
        auto it = buckets.find(key);
        if (it == buckets.end()) {
            buckets.emplace(std::move(key), std::make_pair(&t, in));
        } else if (it->second.second != in) {
            verdict.status = Status::Violated;
            const Tree& other = *it->second.first;
            verdict.witness_pair = it->second.second ? std::make_pair(other, t)
                                                     : std::make_pair(t, other);
            verdict.explored["trees"] = trees.size();
            return verdict;
        }
    }
    verdict.status = Status::Holds;
    verdict.note = "holds-up-to-bound max_nodes=" + std::to_string(max_nodes);
    verdict.explored["trees"] = trees.size();
    return verdict;
}

WordDfa load_word_dfa(const std::string& json_text) {
    nlohmann::json doc = nlohmann::json::parse(json_text);
    WordDfa d;
    for (const auto& l : doc.at("alphabet")) d.letters.push_back(l.get<std::string>());
    std::map<std::string, int> state_id;
    auto tok = [](const nlohmann::json& j) {
        return j.is_string() ? j.get<std::string>() : std::to_string(j.get<long long>());
    };
    for (const auto& s : doc.at("states")) {
        std::string t = tok(s);
        if (state_id.count(t)) throw std::invalid_argument("word dfa: duplicate state");
        state_id[t] = d.n_states++;
    }
    d.initial = state_id.at(tok(doc.at("initial")));
    d.accepting.assign(d.n_states, false);
    for (const auto& s : doc.at("accepting")) d.accepting[state_id.at(tok(s))] = true;
    d.delta.assign(d.letters.size(), std::vector<int>(d.n_states, -1));
    for (const auto& row : doc.at("delta")) {
        std::string letter = row.at("letter").get<std::string>();
        auto it = std::find(d.letters.begin(), d.letters.end(), letter);
        if (it == d.letters.end()) throw std::invalid_argument("word dfa: unknown letter " + letter);
        d.delta[it - d.letters.begin()][state_id.at(tok(row.at("from")))] =
            state_id.at(tok(row.at("to")));
    }
    for (const auto& col : d.delta)
        for (int v : col)
            if (v < 0) throw std::invalid_argument("word dfa: incomplete transition function");
    return d;
}

std::string save_word_dfa(const WordDfa& d) {
    nlohmann::ordered_json doc;
    doc["alphabet"] = d.letters;
    doc["states"] = nlohmann::ordered_json::array();
    for (int q = 0; q < d.n_states; ++q) doc["states"].push_back(q);
    doc["initial"] = d.initial;
    doc["accepting"] = nlohmann::ordered_json::array();
    for (int q = 0; q < d.n_states; ++q)
        if (d.accepting[q]) doc["accepting"].push_back(q);
    doc["delta"] = nlohmann::ordered_json::array();
    for (std::size_t c = 0; c < d.letters.size(); ++c)
        for (int q = 0; q < d.n_states; ++q)
            doc["delta"].push_back(
                {{"from", q}, {"letter", d.letters[c]}, {"to", d.delta[c][q]}});
    return doc.dump(2) + "\n";
}

SyntacticSemigroup syntactic_semigroup(const WordDfa& d) {
    SyntacticSemigroup s;
    std::map<std::vector<int>, int> id;
    auto intern = [&](const std::vector<int>& f) {
        auto [it, fresh] = id.emplace(f, static_cast<int>(s.elements.size()));
        if (fresh) s.elements.push_back(f);
        return it->second;
    };
    for (std::size_t c = 0; c < d.letters.size(); ++c) {
        std::vector<int> f(d.n_states);
        for (int q = 0; q < d.n_states; ++q) f[q] = d.delta[c][q];
        s.letter_element.push_back(intern(f));
    }
    // close under composition (f then g)
    for (std::size_t i = 0; i < s.elements.size(); ++i) {
        for (std::size_t j = 0; j < s.elements.size(); ++j) {
            std::vector<int> fg(d.n_states);
            for (int q = 0; q < d.n_states; ++q) fg[q] = s.elements[j][s.elements[i][q]];
            intern(fg);
        }
    }
    int n = static_cast<int>(s.elements.size());
    s.table.assign(n, std::vector<int>(n));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            std::vector<int> fg(d.n_states);
            for (int q = 0; q < d.n_states; ++q) fg[q] = s.elements[j][s.elements[i][q]];
            s.table[i][j] = id.at(fg);
        }
    for (int i = 0; i < n; ++i)
        if (s.table[i][i] == i) s.idempotents.push_back(i);
    return s;
}

bool lt_equations_hold(const SyntacticSemigroup& s) {
    int n = static_cast<int>(s.elements.size());
    for (int e : s.idempotents) {
        for (int x = 0; x < n; ++x) {
            int exe = s.multiply(s.multiply(e, x), e);
            int exexe = s.multiply(s.multiply(exe, x), e);
            if (exe != exexe) return false;
            for (int y = 0; y < n; ++y) {
                int exeye = s.multiply(s.multiply(s.multiply(s.multiply(e, x), e), y), e);
                int eyexe = s.multiply(s.multiply(s.multiply(s.multiply(e, y), e), x), e);
                if (exeye != eyexe) return false;
            }
        }
    }
    return true;
}

Dfta encode_word_language(const WordDfa& d, const std::string& bottom_symbol) {
    std::vector<Symbol> syms;
    for (const auto& l : d.letters) syms.push_back({l, 1});
    syms.push_back({bottom_symbol, 0});
    RankedAlphabet alphabet(std::move(syms));
    int bot = alphabet.size() - 1;

    // subset construction over "states S such that delta(q, suffix) lands in
    // F iff q in S"; bottom = F, letter c maps S to preimage under c.
    std::map<std::set<int>, int> subset_id;
    std::vector<std::set<int>> subsets;
    auto intern = [&](const std::set<int>& s) {
        auto [it, fresh] = subset_id.emplace(s, static_cast<int>(subsets.size()));
        if (fresh) subsets.push_back(s);
        return it->second;
    };
    std::set<int> finals;
    for (int q = 0; q < d.n_states; ++q)
        if (d.accepting[q]) finals.insert(q);
    intern(finals);
    for (std::size_t head = 0; head < subsets.size(); ++head) {
        std::set<int> cur = subsets[head];
        for (std::size_t c = 0; c < d.letters.size(); ++c) {
            std::set<int> pre;
            for (int q = 0; q < d.n_states; ++q)
                if (cur.count(d.delta[c][q])) pre.insert(q);
            intern(pre);
        }
    }
    int n = static_cast<int>(subsets.size());
    std::vector<bool> final(n);
    for (int i = 0; i < n; ++i) final[i] = subsets[i].count(d.initial) > 0;
    std::vector<std::vector<int>> delta(alphabet.size());
    for (int s = 0; s < alphabet.size() - 1; ++s) {
        delta[s].resize(n);
        for (int i = 0; i < n; ++i) {
            std::set<int> pre;
            for (int q = 0; q < d.n_states; ++q)
                if (subsets[i].count(d.delta[s][q])) pre.insert(q);
            delta[s][i] = subset_id.at(pre);
        }
    }
    delta[bot] = {subset_id.at(finals)};
    return minimize(Dfta(std::move(alphabet), n, std::move(final), std::move(delta)));
}

Tree encode_word(const std::vector<int>& word, const RankedAlphabet& tree_alphabet) {
    Tree t = make_node(tree_alphabet.size() - 1);
    for (auto it = word.rbegin(); it != word.rend(); ++it) t = make_node(*it, {t});
    return t;
}

}  // namespace ltt
