#include "ltt/dfta.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

namespace ltt {

namespace {

std::size_t table_size(int n_states, int arity) {
    std::size_t size = 1;
    for (int i = 0; i < arity; ++i) {
        size *= static_cast<std::size_t>(n_states);
        if (size > (1u << 26)) throw std::invalid_argument("dfta: transition table too large");
    }
    return size;
}

// enumerate all tuples in R^r, calling f(tuple)
void for_each_tuple(const std::vector<int>& domain, int r, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> tuple(r, 0);
    std::vector<int> idx(r, 0);
    if (r == 0) {
        f(tuple);
        return;
    }
    if (domain.empty()) return;
    for (int i = 0; i < r; ++i) tuple[i] = domain[0];
    while (true) {
        f(tuple);
        int pos = r - 1;
        while (pos >= 0) {
            if (++idx[pos] < static_cast<int>(domain.size())) {
                tuple[pos] = domain[idx[pos]];
                break;
            }
            idx[pos] = 0;
            tuple[pos] = domain[0];
            --pos;
        }
        if (pos < 0) break;
    }
}

}  // namespace

Dfta::Dfta(RankedAlphabet alphabet, int n_states, std::vector<bool> final_states,
           std::vector<std::vector<int>> delta)
    : alphabet_(std::move(alphabet)),
      n_states_(n_states),
      final_(std::move(final_states)),
      delta_(std::move(delta)) {
    if (n_states_ < 1) throw std::invalid_argument("dfta: need at least one state");
    if (static_cast<int>(final_.size()) != n_states_)
        throw std::invalid_argument("dfta: final vector size mismatch");
    if (static_cast<int>(delta_.size()) != alphabet_.size())
        throw std::invalid_argument("dfta: delta table count mismatch");
    for (int s = 0; s < alphabet_.size(); ++s) {
        std::size_t want = table_size(n_states_, alphabet_.arity(s));
        if (delta_[s].size() != want)
            throw std::invalid_argument("dfta: incomplete delta for symbol " + alphabet_.name(s));
        for (int q : delta_[s])
            if (q < 0 || q >= n_states_)
                throw std::invalid_argument("dfta: transition target out of range");
    }
}

std::size_t Dfta::delta_index(int symbol, const std::vector<int>& children) const {
    std::size_t idx = 0;
    for (int q : children) idx = idx * static_cast<std::size_t>(n_states_) + static_cast<std::size_t>(q);
    (void)symbol;
    return idx;
}

int Dfta::delta(int symbol, const std::vector<int>& children) const {
    if (static_cast<int>(children.size()) != alphabet_.arity(symbol))
        throw std::invalid_argument("dfta: arity mismatch in delta lookup");
    return delta_[symbol][delta_index(symbol, children)];
}

int Dfta::run(const Tree& t) const {
    std::unordered_map<const TreeNode*, int> memo;
    // explicit post-order; witness trees can be deep
    std::vector<const TreeNode*> stack{t.get()};
    std::unordered_map<const TreeNode*, const Tree*> nodes;
    nodes[t.get()] = &t;
    while (!stack.empty()) {
        const TreeNode* node = stack.back();
        if (memo.count(node)) {
            stack.pop_back();
            continue;
        }
        if (node->label < 0) throw std::invalid_argument("dfta: cannot run on a tree with ports/holes");
        if (node->label >= alphabet_.size())
            throw std::invalid_argument("dfta: tree label outside the automaton alphabet");
        if (static_cast<int>(node->children.size()) != alphabet_.arity(node->label))
            throw std::invalid_argument("dfta: tree arity mismatch");
        bool ready = true;
        for (const auto& c : node->children) {
            if (!memo.count(c.get())) {
                stack.push_back(c.get());
                ready = false;
            }
        }
        if (!ready) continue;
        std::vector<int> child_states;
        child_states.reserve(node->children.size());
        for (const auto& c : node->children) child_states.push_back(memo[c.get()]);
        memo[node] = delta_[node->label][delta_index(node->label, child_states)];
        stack.pop_back();
    }
    return memo[t.get()];
}

std::vector<int> Reachability::states() const {
    std::vector<int> out;
    for (int q = 0; q < static_cast<int>(reachable.size()); ++q)
        if (reachable[q]) out.push_back(q);
    return out;
}

Reachability reachable_states(const Dfta& a) {
    int n = a.n_states();
    Reachability r;
    r.reachable.assign(n, false);
    r.witness.assign(n, Tree());
    std::vector<std::uint64_t> size(n, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < a.alphabet().size(); ++s) {
            int ar = a.alphabet().arity(s);
            std::vector<int> domain;
            for (int q = 0; q < n; ++q)
                if (r.reachable[q]) domain.push_back(q);
            if (ar > 0 && domain.empty()) continue;
            for_each_tuple(domain, ar, [&](const std::vector<int>& tuple) {
                std::uint64_t sz = 1;
                for (int q : tuple) sz += size[q];
                int target = a.delta(s, tuple);
                if (!r.reachable[target] || sz < size[target]) {
                    std::vector<Tree> kids;
                    kids.reserve(tuple.size());
                    for (int q : tuple) kids.push_back(r.witness[q]);
                    r.reachable[target] = true;
                    r.witness[target] = make_node(s, std::move(kids));
                    size[target] = sz;
                    changed = true;
                }
            });
        }
    }
    return r;
}

std::vector<bool> coreachable_states(const Dfta& a, const Reachability& reach) {
    int n = a.n_states();
    std::vector<bool> co(n, false);
    for (int q = 0; q < n; ++q)
        if (reach.reachable[q] && a.is_final(q)) co[q] = true;
    std::vector<int> domain = reach.states();
    bool changed = true;
    while (changed) {
        changed = false;
        for (int s = 0; s < a.alphabet().size(); ++s) {
            int ar = a.alphabet().arity(s);
            if (ar == 0) continue;
            for_each_tuple(domain, ar, [&](const std::vector<int>& tuple) {
                if (!co[a.delta(s, tuple)]) return;
                for (int q : tuple) {
                    if (!co[q]) {
                        co[q] = true;
                        changed = true;
                    }
                }
            });
        }
    }
    return co;
}

bool is_empty(const Dfta& a) {
    Reachability r = reachable_states(a);
    for (int q = 0; q < a.n_states(); ++q)
        if (r.reachable[q] && a.is_final(q)) return false;
    return true;
}

Dfta product(const Dfta& a, const Dfta& b, const std::function<bool(bool, bool)>& combine) {
    if (!(a.alphabet() == b.alphabet()))
        throw std::invalid_argument("product: alphabet mismatch");
    const RankedAlphabet& alphabet = a.alphabet();
    std::map<std::pair<int, int>, int> id;
    std::vector<std::pair<int, int>> pairs;
    auto intern = [&](int qa, int qb) {
        auto [it, fresh] = id.emplace(std::make_pair(qa, qb), static_cast<int>(pairs.size()));
        if (fresh) pairs.emplace_back(qa, qb);
        return it->second;
    };
    // saturate the reachable part of the pairing
    bool changed = true;
    while (changed) {
        changed = false;
        std::size_t before = pairs.size();
        for (int s = 0; s < alphabet.size(); ++s) {
            int ar = alphabet.arity(s);
            std::vector<int> domain(pairs.size());
            for (std::size_t i = 0; i < pairs.size(); ++i) domain[i] = static_cast<int>(i);
            for_each_tuple(domain, ar, [&](const std::vector<int>& tuple) {
                std::vector<int> ca(ar), cb(ar);
                for (int i = 0; i < ar; ++i) {
                    ca[i] = pairs[tuple[i]].first;
                    cb[i] = pairs[tuple[i]].second;
                }
                intern(a.delta(s, ca), b.delta(s, cb));
            });
        }
        changed = pairs.size() > before;
    }
    int n = static_cast<int>(pairs.size());
    std::vector<bool> final(n);
    for (int i = 0; i < n; ++i)
        final[i] = combine(a.is_final(pairs[i].first), b.is_final(pairs[i].second));
    std::vector<std::vector<int>> delta(alphabet.size());
    for (int s = 0; s < alphabet.size(); ++s) {
        int ar = alphabet.arity(s);
        delta[s].assign(table_size(n, ar), 0);
        std::vector<int> domain(n);
        for (int i = 0; i < n; ++i) domain[i] = i;
        for_each_tuple(domain, ar, [&](const std::vector<int>& tuple) {
            std::vector<int> ca(ar), cb(ar);
            for (int i = 0; i < ar; ++i) {
                ca[i] = pairs[tuple[i]].first;
                cb[i] = pairs[tuple[i]].second;
            }
            std::size_t idx = 0;
            for (int q : tuple) idx = idx * n + q;
            delta[s][idx] = id.at({a.delta(s, ca), b.delta(s, cb)});
        });
    }
    return Dfta(alphabet, n, std::move(final), std::move(delta));
}

Dfta complement(const Dfta& a) {
    std::vector<bool> final(a.n_states());
    for (int q = 0; q < a.n_states(); ++q) final[q] = !a.is_final(q);
    return Dfta(a.alphabet(), a.n_states(), std::move(final), a.delta_tables());
}

bool equivalent(const Dfta& a, const Dfta& b) {
    return is_empty(product(a, b, [](bool x, bool y) { return x != y; }));
}

Dfta minimize(const Dfta& a) {
    const RankedAlphabet& alphabet = a.alphabet();
    Reachability reach = reachable_states(a);
    std::vector<int> live = reach.states();
    if (live.empty()) throw std::logic_error("minimize: no reachable state");
    int n = a.n_states();

    // block[q] for reachable q; refine until stable
    std::vector<int> block(n, -1);
    for (int q : live) block[q] = a.is_final(q) ? 1 : 0;
    bool stable = false;
    while (!stable) {
        // signature: current block plus blocks of all one-step contexts
        std::map<std::vector<int>, int> sig_ids;
        std::vector<int> new_block(n, -1);
        for (int q : live) {
            std::vector<int> sig{block[q]};
            for (int s = 0; s < alphabet.size(); ++s) {
                int ar = alphabet.arity(s);
                if (ar == 0) continue;
                for (int pos = 0; pos < ar; ++pos) {
                    for_each_tuple(live, ar - 1, [&](const std::vector<int>& rest) {
                        std::vector<int> tuple(ar);
                        for (int i = 0, j = 0; i < ar; ++i) tuple[i] = (i == pos) ? q : rest[j++];
                        sig.push_back(block[a.delta(s, tuple)]);
                    });
                }
            }
            auto [it, fresh] = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size()));
            new_block[q] = it->second;
        }
        // the new partition refines the old one (the signature starts with
        // the old block), so equal block counts mean a fixpoint
        std::set<int> old_blocks, new_blocks;
        for (int q : live) {
            old_blocks.insert(block[q]);
            new_blocks.insert(new_block[q]);
        }
        stable = old_blocks.size() == new_blocks.size();
        block = std::move(new_block);
    }

    // canonical block numbering in order of first member
    std::map<int, int> renumber;
    for (int q : live)
        if (!renumber.count(block[q])) {
            int next = static_cast<int>(renumber.size());
            renumber[block[q]] = next;
        }
    int m = static_cast<int>(renumber.size());
    std::vector<bool> final(m, false);
    for (int q : live)
        if (a.is_final(q)) final[renumber[block[q]]] = true;

    std::vector<int> rep(m, -1);  // one representative per block
    for (int q : live) {
        int b = renumber[block[q]];
        if (rep[b] < 0) rep[b] = q;
    }
    std::vector<std::vector<int>> delta(alphabet.size());
    for (int s = 0; s < alphabet.size(); ++s) {
        int ar = alphabet.arity(s);
        delta[s].assign(table_size(m, ar), 0);
        std::vector<int> domain(m);
        for (int i = 0; i < m; ++i) domain[i] = i;
        for_each_tuple(domain, ar, [&](const std::vector<int>& tuple) {
            std::vector<int> orig(ar);
            for (int i = 0; i < ar; ++i) orig[i] = rep[tuple[i]];
            std::size_t idx = 0;
            for (int q : tuple) idx = idx * m + q;
            delta[s][idx] = renumber[block[a.delta(s, orig)]];
        });
    }
    return Dfta(alphabet, m, std::move(final), std::move(delta));
}

std::optional<Tree> separating_context(const Dfta& a, int q1, int q2) {
    if (q1 == q2) return std::nullopt;
    if (a.is_final(q1) != a.is_final(q2)) return make_port();
    Reachability reach = reachable_states(a);
    std::vector<int> live = reach.states();
    int n = a.n_states();
    struct Step {
        int symbol, pos;
        std::vector<int> rest;  // side states
        int prev;               // index into visited order
    };
    std::map<std::pair<int, int>, int> seen;
    std::vector<std::pair<int, int>> order{{q1, q2}};
    std::vector<Step> steps{{-1, -1, {}, -1}};
    seen[{q1, q2}] = 0;
    for (std::size_t head = 0; head < order.size(); ++head) {
        auto [x, y] = order[head];
        for (int s = 0; s < a.alphabet().size(); ++s) {
            int ar = a.alphabet().arity(s);
            if (ar == 0) continue;
            for (int pos = 0; pos < ar; ++pos) {
                bool found = false;
                for_each_tuple(live, ar - 1, [&](const std::vector<int>& rest) {
                    if (found) return;
                    std::vector<int> tx(ar), ty(ar);
                    for (int i = 0, j = 0; i < ar; ++i) {
                        tx[i] = (i == pos) ? x : rest[j];
                        ty[i] = (i == pos) ? y : rest[j];
                        if (i != pos) ++j;
                    }
                    int nx = a.delta(s, tx), ny = a.delta(s, ty);
                    if (seen.count({nx, ny})) return;
                    seen[{nx, ny}] = static_cast<int>(order.size());
                    order.emplace_back(nx, ny);
                    steps.push_back({s, pos, rest, static_cast<int>(head)});
                    if (a.is_final(nx) != a.is_final(ny)) found = true;
                });
                if (found) {
                    // rebuild: innermost step first
                    std::vector<int> chain;
                    for (int at = static_cast<int>(order.size()) - 1; at > 0; at = steps[at].prev)
                        chain.push_back(at);
                    std::reverse(chain.begin(), chain.end());
                    Tree c = make_port();
                    for (int at : chain) {
                        const Step& st = steps[at];
                        std::vector<Tree> kids(a.alphabet().arity(st.symbol));
                        for (int i = 0, j = 0; i < static_cast<int>(kids.size()); ++i)
                            kids[i] = (i == st.pos) ? c : reach.witness[st.rest[j++]];
                        c = make_node(st.symbol, std::move(kids));
                    }
                    return c;
                }
            }
        }
        (void)n;
    }
    return std::nullopt;
}

Dfta random_dfta(const RankedAlphabet& alphabet, int n_states, std::uint64_t seed) {
    if (n_states < 1) throw std::invalid_argument("random_dfta: need at least one state");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> state_dist(0, n_states - 1);
    std::vector<std::vector<int>> delta(alphabet.size());
    for (int s = 0; s < alphabet.size(); ++s) {
        delta[s].resize(table_size(n_states, alphabet.arity(s)));
        for (auto& q : delta[s]) q = state_dist(rng);
    }
    std::vector<bool> final(n_states);
    for (int q = 0; q < n_states; ++q) final[q] = rng() & 1;
    return Dfta(alphabet, n_states, std::move(final), std::move(delta));
}

namespace {

using json = nlohmann::ordered_json;

std::string state_token(const json& j) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return std::to_string(j.get<long long>());
    throw std::invalid_argument("dfta file: state id must be string or integer");
}

}  // namespace

Dfta load_dfta(const std::string& json_text, bool complete_with_sink) {
    json doc = json::parse(json_text);
    std::vector<Symbol> syms;
    for (const auto& s : doc.at("alphabet"))
        syms.push_back({s.at("symbol").get<std::string>(), s.at("arity").get<int>()});
    RankedAlphabet alphabet(std::move(syms));

    std::map<std::string, int> state_id;
    std::vector<std::string> state_names;
    for (const auto& s : doc.at("states")) {
        std::string tok = state_token(s);
        if (state_id.count(tok)) throw std::invalid_argument("dfta file: duplicate state " + tok);
        state_id[tok] = static_cast<int>(state_names.size());
        state_names.push_back(tok);
    }
    int n = static_cast<int>(state_names.size());
    if (n == 0) throw std::invalid_argument("dfta file: no states");

    std::vector<bool> final(n, false);
    for (const auto& s : doc.at("final")) {
        auto it = state_id.find(state_token(s));
        if (it == state_id.end()) throw std::invalid_argument("dfta file: unknown final state");
        final[it->second] = true;
    }

    int n_total = n + (complete_with_sink ? 1 : 0);
    std::vector<std::vector<int>> delta(alphabet.size());
    std::vector<std::vector<bool>> defined(alphabet.size());
    for (int s = 0; s < alphabet.size(); ++s) {
        std::size_t size = table_size(n_total, alphabet.arity(s));
        delta[s].assign(size, -1);
        defined[s].assign(size, false);
    }
    for (const auto& row : doc.at("delta")) {
        std::string sym_name = row.at("symbol").get<std::string>();
        auto sym = alphabet.find(sym_name);
        if (!sym) throw std::invalid_argument("dfta file: unknown symbol " + sym_name);
        std::vector<int> children;
        for (const auto& c : row.at("children")) {
            auto it = state_id.find(state_token(c));
            if (it == state_id.end()) throw std::invalid_argument("dfta file: unknown child state");
            children.push_back(it->second);
        }
        if (static_cast<int>(children.size()) != alphabet.arity(*sym))
            throw std::invalid_argument("dfta file: arity mismatch for symbol " + sym_name);
        auto it = state_id.find(state_token(row.at("to")));
        if (it == state_id.end()) throw std::invalid_argument("dfta file: unknown target state");
        std::size_t idx = 0;
        for (int q : children) idx = idx * n_total + q;
        if (defined[*sym][idx] && delta[*sym][idx] != it->second)
            throw std::invalid_argument("dfta file: conflicting transitions (nondeterministic)");
        delta[*sym][idx] = it->second;
        defined[*sym][idx] = true;
    }
    for (int s = 0; s < alphabet.size(); ++s) {
        for (std::size_t i = 0; i < delta[s].size(); ++i) {
            if (delta[s][i] < 0) {
                if (!complete_with_sink)
                    throw std::invalid_argument("dfta file: incomplete delta for symbol " +
                                                alphabet.name(s) + " (use complete-with-sink)");
                delta[s][i] = n;  // sink
            }
        }
    }
    if (complete_with_sink) final.push_back(false);
    return Dfta(std::move(alphabet), n_total, std::move(final), std::move(delta));
}

std::string save_dfta(const Dfta& a) {
    json doc;
    doc["alphabet"] = json::array();
    for (const auto& s : a.alphabet().symbols())
        doc["alphabet"].push_back({{"symbol", s.name}, {"arity", s.arity}});
    doc["states"] = json::array();
    for (int q = 0; q < a.n_states(); ++q) doc["states"].push_back(q);
    doc["final"] = json::array();
    for (int q = 0; q < a.n_states(); ++q)
        if (a.is_final(q)) doc["final"].push_back(q);
    doc["delta"] = json::array();
    for (int s = 0; s < a.alphabet().size(); ++s) {
        int ar = a.alphabet().arity(s);
        std::vector<int> domain(a.n_states());
        for (int i = 0; i < a.n_states(); ++i) domain[i] = i;
        for_each_tuple(domain, ar, [&](const std::vector<int>& tuple) {
            doc["delta"].push_back({{"symbol", a.alphabet().name(s)},
                                    {"children", tuple},
                                    {"to", a.delta(s, tuple)}});
        });
    }
    return doc.dump(2) + "\n";
}

}  // namespace ltt
