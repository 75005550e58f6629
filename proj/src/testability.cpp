#include "ltt/testability.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <unordered_map>

#include "ltt/tameness.hpp"
#include "ltt/typed_analysis.hpp"

namespace ltt {

OccurrenceAutomaton::OccurrenceAutomaton(RankedAlphabet alphabet, int kappa)
    : alphabet_(std::move(alphabet)), kappa_(kappa), types_(kappa) {
    if (kappa < 0) throw std::invalid_argument("occurrence automaton: kappa must be >= 0");
}

int OccurrenceAutomaton::intern(int root_type, std::vector<int> occ) {
    auto key = std::make_pair(root_type, occ);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(states_.size());
    states_.push_back({root_type, std::move(occ)});
    index_.emplace(std::move(key), id);
    return id;
}

int OccurrenceAutomaton::type_transition(int symbol, const std::vector<int>& child_root_types) {
    auto key = std::make_pair(symbol, child_root_types);
    auto it = type_memo_.find(key);
    if (it != type_memo_.end()) return it->second;
    Tree shape;
    if (kappa_ == 0) {
        shape = make_node(symbol);
    } else {
        std::vector<Tree> kid_shapes;
        kid_shapes.reserve(child_root_types.size());
        for (int rt : child_root_types) kid_shapes.push_back(truncate(types_.shape(rt), kappa_ - 1));
        shape = make_node(symbol, std::move(kid_shapes));
    }
    int rt = types_.intern(shape);
    type_memo_.emplace(std::move(key), rt);
    return rt;
}

int OccurrenceAutomaton::transition(int symbol, const std::vector<int>& child_states) {
    if (static_cast<int>(child_states.size()) != alphabet_.arity(symbol))
        throw std::invalid_argument("occurrence automaton: arity mismatch");
    std::vector<int> kid_types;
    std::set<int> occ;
    kid_types.reserve(child_states.size());
    for (int cs : child_states) {
        const State& c = states_.at(cs);
        occ.insert(c.occ.begin(), c.occ.end());
        kid_types.push_back(c.root_type);
    }
    int rt = type_transition(symbol, kid_types);
    occ.insert(rt);
    return intern(rt, std::vector<int>(occ.begin(), occ.end()));
}

int OccurrenceAutomaton::eval(const Tree& t) {
    std::unordered_map<const TreeNode*, int> memo;
    std::function<int(const Tree&)> go = [&](const Tree& node) -> int {
        auto it = memo.find(node.get());
        if (it != memo.end()) return it->second;
        std::vector<int> kids;
        kids.reserve(node->children.size());
        for (const auto& c : node->children) kids.push_back(go(c));
        int id = transition(node->label, kids);
        memo.emplace(node.get(), id);
        return id;
    };
    return go(t);
}

namespace {

// deterministic budget-steered random derivations of accepting trees
struct DerivationSampler {
    explicit DerivationSampler(const Dfta& a, std::uint64_t seed) : a_(a), rng_(seed) {
        reach_ = reachable_states(a);
        int n = a.n_states();
        minsize_.assign(n, 0);
        for (int q = 0; q < n; ++q)
            if (reach_.reachable[q]) minsize_[q] = tree_size(reach_.witness[q]);
        prods_.resize(n);
        std::vector<int> live = reach_.states();
        for (int s = 0; s < a.alphabet().size(); ++s) {
            int ar = a.alphabet().arity(s);
            std::vector<int> tuple(ar, 0);
            std::function<void(int)> rec = [&](int pos) {
                if (pos == ar) {
                    prods_[a.delta(s, tuple)].push_back({s, tuple});
                    return;
                }
                for (int q : live) {
                    tuple[pos] = q;
                    rec(pos + 1);
                }
            };
            rec(0);
        }
        for (int q = 0; q < n; ++q)
            if (reach_.reachable[q] && a.is_final(q)) finals_.push_back(q);
    }

    Tree sample_accepting(std::uint64_t size_budget) {
        if (finals_.empty()) return Tree();
        int q = finals_[rng_() % finals_.size()];
        return sample_state(q, std::max(size_budget, minsize_[q]));
    }

    Tree sample_state(int q, std::uint64_t budget) {
        std::vector<const std::pair<int, std::vector<int>>*> fits;
        for (const auto& p : prods_[q]) {
            std::uint64_t need = 1;
            bool ok = true;
            for (int c : p.second) {
                if (!reach_.reachable[c]) {
                    ok = false;
                    break;
                }
                need += minsize_[c];
            }
            if (ok && need <= budget) fits.push_back(&p);
        }
        if (fits.empty()) return reach_.witness[q];
        const auto& [s, kids_states] = *fits[rng_() % fits.size()];
        int ar = static_cast<int>(kids_states.size());
        std::vector<Tree> kids(ar);
        std::uint64_t spare = budget - 1;
        for (int c : kids_states) spare -= minsize_[c];
        for (int i = 0; i < ar; ++i) {
            std::uint64_t share = spare;
            if (i + 1 < ar && spare) share = rng_() % (spare + 1);
            kids[i] = sample_state(kids_states[i], minsize_[kids_states[i]] + share);
            spare -= share;
        }
        return make_node(s, std::move(kids));
    }

    const Dfta& a_;
    Reachability reach_;
    std::vector<std::uint64_t> minsize_;
    std::vector<std::vector<std::pair<int, std::vector<int>>>> prods_;
    std::vector<int> finals_;
    std::mt19937_64 rng_;
};

// shortest nonempty one-hole context whose state map fixes q, if any
std::optional<Tree> state_loop_context(const Dfta& a, const Reachability& reach, int q) {
    std::vector<int> live = reach.states();
    struct Step {
        int symbol, pos;
        std::vector<int> rest;
        int prev;
    };
    std::map<int, int> seen;  // state -> entry index
    std::vector<int> order{q};
    std::vector<Step> steps{{-1, -1, {}, -1}};
    seen[q] = 0;
    int target = -1;
    for (std::size_t head = 0; head < order.size() && target < 0; ++head) {
        int cur = order[head];
        for (int s = 0; s < a.alphabet().size() && target < 0; ++s) {
            int ar = a.alphabet().arity(s);
            if (ar == 0) continue;
            for (int pos = 0; pos < ar && target < 0; ++pos) {
                std::vector<int> rest(ar - 1, 0);
                bool done = ar > 1 && live.empty();
                while (!done && target < 0) {
                    std::vector<int> tuple(ar);
                    for (int i = 0, j = 0; i < ar; ++i)
                        tuple[i] = (i == pos) ? cur : live[rest[j++]];
                    int next = a.delta(s, tuple);
                    std::vector<int> rest_states;
                    for (int i = 0; i < ar; ++i)
                        if (i != pos) rest_states.push_back(tuple[i]);
                    if (next == q) {
                        order.push_back(next);
                        steps.push_back({s, pos, rest_states, static_cast<int>(head)});
                        target = static_cast<int>(order.size()) - 1;
                        break;
                    }
                    if (!seen.count(next)) {
                        seen[next] = static_cast<int>(order.size());
                        order.push_back(next);
                        steps.push_back({s, pos, rest_states, static_cast<int>(head)});
                    }
                    int p = ar - 2;
                    while (p >= 0 && ++rest[p] == static_cast<int>(live.size())) rest[p--] = 0;
                    done = p < 0 || ar == 1;
                }
            }
        }
    }
    if (target < 0) return std::nullopt;
    std::vector<int> chain;
    for (int at = target; at > 0; at = steps[at].prev) chain.push_back(at);
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

// wrap every node of t with its state's loop context repeated `power` times;
// run states, and hence acceptance, are unchanged
Tree pump_state_loops(const Dfta& a, const Reachability& reach, const Tree& t, int power) {
    std::map<int, std::optional<Tree>> loops;
    auto loop_of = [&](int q) -> const std::optional<Tree>& {
        auto it = loops.find(q);
        if (it == loops.end()) it = loops.emplace(q, state_loop_context(a, reach, q)).first;
        return it->second;
    };
    std::function<Tree(const Tree&)> go = [&](const Tree& node) -> Tree {
        std::vector<Tree> kids;
        kids.reserve(node->children.size());
        for (const auto& c : node->children) kids.push_back(go(c));
        Tree rebuilt = make_node(node->label, std::move(kids));
        int q = a.run(rebuilt);
        const auto& loop = loop_of(q);
        if (!loop) return rebuilt;
        for (int i = 0; i < power; ++i) rebuilt = graft(*loop, rebuilt);
        return rebuilt;
    };
    return go(t);
}

void for_each_pivot_tuple(int r, int pivot, int limit,
                          const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> tuple(r);
    std::function<void(int, bool)> rec = [&](int pos, bool used) {
        if (pos == r) {
            if (used) f(tuple);
            return;
        }
        for (int v = 0; v < limit; ++v) {
            tuple[pos] = v;
            rec(pos + 1, used || v == pivot);
        }
    };
    rec(0, false);
}

// Search for a rejecting tree whose types all stay inside the support set
// `allowed`, whose occurrence set is exactly `allowed`, and whose root type
// is one of `goal_root_types`.  The reachable space is finite, so the search
// is exact whenever it finishes inside the budget.
struct ConformingSearch {
    const Dfta& a;
    OccurrenceAutomaton& occ;
    std::vector<int> allowed;           // sorted type ids (the target occ set)
    std::set<int> goal_root_types;

    bool conclusive = false;
    std::optional<std::pair<Tree, int>> found_tree;  // tree + its root type

    void run(const Budget& budget, std::uint64_t& steps) {
        std::set<int> allowed_set(allowed.begin(), allowed.end());

        std::map<std::vector<int>, int> occset_ids;
        std::vector<std::vector<int>> occsets;
        auto intern_set = [&](std::vector<int> s) {
            auto [it, fresh] = occset_ids.emplace(s, static_cast<int>(occsets.size()));
            if (fresh) occsets.push_back(std::move(s));
            return it->second;
        };

        struct PState {
            int q, root_type, occ_set;
        };
        struct Deriv {
            int symbol;
            std::vector<int> children;
        };
        std::map<std::tuple<int, int, int>, int> index;
        std::vector<PState> states;
        std::vector<Deriv> derivs;
        int found = -1;
        bool over_budget = false;

        auto intern = [&](int q, int rt, int os, Deriv d) {
            auto [it, fresh] =
                index.emplace(std::make_tuple(q, rt, os), static_cast<int>(states.size()));
            if (fresh) {
                states.push_back({q, rt, os});
                derivs.push_back(std::move(d));
                if (found < 0 && !a.is_final(q) && goal_root_types.count(rt) &&
                    occsets[os] == allowed)
                    found = it->second;
            }
        };

        const RankedAlphabet& alphabet = a.alphabet();
        for (int s = 0; s < alphabet.size(); ++s) {
            if (alphabet.arity(s) != 0) continue;
            int rt = occ.type_transition(s, {});
            if (!allowed_set.count(rt)) continue;
            intern(a.delta(s, {}), rt, intern_set({rt}), {s, {}});
        }
        for (std::size_t head = 0; head < states.size() && found < 0 && !over_budget; ++head) {
            for (int s = 0; s < alphabet.size() && found < 0; ++s) {
                int ar = alphabet.arity(s);
                if (ar == 0) continue;
                for_each_pivot_tuple(ar, static_cast<int>(head), static_cast<int>(head) + 1,
                                     [&](const std::vector<int>& tuple) {
                    if (found >= 0 || over_budget) return;
                    if (++steps > budget.max_steps ||
                        states.size() > budget.max_product_states) {
                        over_budget = true;
                        return;
                    }
                    std::vector<int> child_states(ar), kid_types(ar);
                    std::set<int> occ_union;
                    for (int i = 0; i < ar; ++i) {
                        const PState& c = states[tuple[i]];
                        child_states[i] = c.q;
                        kid_types[i] = c.root_type;
                        const auto& cs = occsets[c.occ_set];
                        occ_union.insert(cs.begin(), cs.end());
                    }
                    int rt = occ.type_transition(s, kid_types);
                    if (!allowed_set.count(rt)) return;  // leaves the support
                    occ_union.insert(rt);
                    intern(a.delta(s, child_states), rt,
                           intern_set(std::vector<int>(occ_union.begin(), occ_union.end())),
                           {s, tuple});
                });
            }
        }
        if (over_budget) return;
        conclusive = true;
        if (found < 0) return;
        std::function<Tree(int)> build = [&](int id) -> Tree {
            const Deriv& d = derivs[id];
            std::vector<Tree> kids;
            kids.reserve(d.children.size());
            for (int c : d.children) kids.push_back(build(c));
            return make_node(d.symbol, std::move(kids));
        };
        found_tree = std::make_pair(build(found), states[found].root_type);
    }
};

}  // namespace

ClosureVerdict is_kappa_testable(const Dfta& a_in, int kappa, const Budget& budget) {
    if (kappa < 0) throw std::invalid_argument("is_kappa_testable: kappa must be >= 0");
    Dfta a = minimize(a_in);
    ClosureVerdict verdict;
    OccurrenceAutomaton occ(a.alphabet(), kappa);

    Reachability reach = reachable_states(a);
    bool any_acc = false, any_rej = false;
    for (int q : reach.states()) (a.is_final(q) ? any_acc : any_rej) = true;
    if (!any_acc || !any_rej) {
        verdict.status = Status::Holds;
        verdict.note = "trivial language";
        return verdict;
    }

    // root-determined shortcut: if the root kappa-type already fixes
    // acceptance, so does the full datum
    bool type_space_small = false;
    try {
        BigUint space = count_ktypes(a.alphabet(), kappa);
        type_space_small = space.fits_u64() && space.to_u64() <= budget.max_typed_states;
    } catch (const std::overflow_error&) {
    }
    if (type_space_small) {
        TypedStateSet ts(a, kappa, budget);
        if (ts.complete()) {
            std::map<int, int> finality;
            bool uniform = true;
            for (const auto& tsx : ts.states()) {
                int f = a.is_final(tsx.state) ? 1 : 0;
                auto [it, fresh] = finality.emplace(tsx.type_id, f);
                if (!fresh && it->second != f) uniform = false;
            }
            if (uniform) {
                verdict.status = Status::Holds;
                verdict.note = "root type determines membership";
                verdict.explored["typed_states"] = ts.states().size();
                return verdict;
            }
        }
    }
    std::vector<bool> co = coreachable_states(a, reach);

    // product exploration over co-reachable language states, smallest
    // witnesses first
    struct PState {
        int q;
        int occ_state;
    };
    struct Deriv {
        int symbol;
        std::vector<int> children;
        std::uint64_t size;
    };
    std::map<std::pair<int, int>, int> index;
    std::vector<PState> states;
    std::vector<Deriv> derivs;
    // (occ_state) -> first accepting / first rejecting product id
    std::map<int, std::pair<int, int>> seen;

    std::function<Tree(int)> build = [&](int id) -> Tree {
        const Deriv& d = derivs[id];
        std::vector<Tree> kids;
        kids.reserve(d.children.size());
        for (int c : d.children) kids.push_back(build(c));
        return make_node(d.symbol, std::move(kids));
    };

    std::optional<std::pair<Tree, Tree>> conflict;  // (member, nonmember)
    auto note_conflict = [&](int id) {
        const PState& st = states[id];
        auto& slot = seen[st.occ_state];
        int& mine = a.is_final(st.q) ? slot.first : slot.second;
        if (mine < 0) mine = id;
        if (slot.first >= 0 && slot.second >= 0 && !conflict)
            conflict = std::make_pair(build(slot.first), build(slot.second));
    };
    auto intern = [&](int q, int os, Deriv d) {
        auto [it, fresh] = index.emplace(std::make_pair(q, os), static_cast<int>(states.size()));
        if (fresh) {
            states.push_back({q, os});
            derivs.push_back(std::move(d));
            seen.try_emplace(os, std::make_pair(-1, -1));
            note_conflict(it->second);
        }
        return it->second;
    };

    std::uint64_t steps = 0;
    bool complete = true;
    const RankedAlphabet& alphabet = a.alphabet();

    auto combine = [&](int s, const std::vector<int>& kids, std::uint64_t size) {
        int ar = static_cast<int>(kids.size());
        std::vector<int> qs(ar), os(ar);
        for (int i = 0; i < ar; ++i) {
            qs[i] = states[kids[i]].q;
            os[i] = states[kids[i]].occ_state;
        }
        int q = a.delta(s, qs);
        if (!co[q]) return;
        intern(q, occ.transition(s, os), {s, kids, size});
    };

    // stage 1 — strict size order: every product state realizable with at
    // most size_cap nodes is discovered, smallest first, so conflicts among
    // small data cannot be starved by the combinatorics of larger ones
    std::vector<std::vector<int>> bucket;  // by witness size
    auto rebucket = [&](std::size_t from) {
        for (std::size_t id = from; id < states.size(); ++id) {
            std::uint64_t sz = derivs[id].size;
            if (bucket.size() <= sz) bucket.resize(sz + 1);
            bucket[sz].push_back(static_cast<int>(id));
        }
    };
    for (int s = 0; s < alphabet.size(); ++s) {
        if (alphabet.arity(s) != 0) continue;
        int q = a.delta(s, {});
        if (!co[q]) continue;
        int rt = occ.eval(make_node(s));
        intern(q, rt, {s, {}, 1});
    }
    rebucket(0);
    bool stage1_cut = false;
    for (std::uint64_t size = 2; size < 128 && !conflict && !stage1_cut; ++size) {
        std::size_t before = states.size();
        for (int s = 0; s < alphabet.size() && !conflict; ++s) {
            int ar = alphabet.arity(s);
            if (ar == 0) continue;
            // compositions of size-1 into ar child sizes
            std::vector<int> kids(ar);
            std::function<void(int, std::uint64_t)> comp = [&](int pos, std::uint64_t left) {
                if (conflict || stage1_cut) return;
                if (pos == ar - 1) {
                    if (left < 1 || left >= bucket.size()) return;
                    for (int last : bucket[left]) {
                        if (conflict) return;
                        if (++steps > budget.max_steps ||
                            states.size() > budget.max_product_states) {
                            stage1_cut = true;
                            return;
                        }
                        kids[pos] = last;
                        combine(s, kids, size);
                    }
                    return;
                }
                std::uint64_t reserve = static_cast<std::uint64_t>(ar - pos - 1);
                for (std::uint64_t take = 1; take + reserve <= left; ++take) {
                    if (take >= bucket.size()) break;
                    for (int child : bucket[take]) {
                        kids[pos] = child;
                        comp(pos + 1, left - take);
                        if (conflict || stage1_cut) return;
                    }
                }
            };
            comp(0, size - 1);
        }
        rebucket(before);
        // nothing new appeared at this size or later: the space below the
        // horizon is exhausted
        if (states.size() == before && size >= bucket.size()) break;
    }
    if (stage1_cut) complete = false;

    // stage 2 — saturation for a complete fixpoint, feasible only when the
    // discovered set stayed small
    if (!conflict && !stage1_cut) {
        std::uint64_t predicted = 0;
        for (int s = 0; s < alphabet.size(); ++s) {
            std::uint64_t t = 1;
            for (int i = 0; i < alphabet.arity(s); ++i) {
                t *= states.size() + 1;
                if (t > budget.max_steps) break;
            }
            predicted += t;
        }
        if (predicted > budget.max_steps) {
            complete = false;
        } else {
            for (std::size_t pivot = 0; pivot < states.size() && !conflict; ++pivot) {
                if (states.size() > budget.max_product_states || steps > budget.max_steps) {
                    complete = false;
                    break;
                }
                for (int s = 0; s < alphabet.size() && !conflict; ++s) {
                    int ar = alphabet.arity(s);
                    if (ar == 0) continue;
                    for_each_pivot_tuple(ar, static_cast<int>(pivot),
                                         static_cast<int>(pivot) + 1,
                                         [&](const std::vector<int>& tuple) {
                        if (conflict) return;
                        if (++steps > budget.max_steps ||
                            states.size() > budget.max_product_states) {
                            complete = false;
                            return;
                        }
                        std::uint64_t size = 1;
                        for (int id : tuple) size += derivs[id].size;
                        combine(s, tuple, size);
                    });
                }
            }
        }
    }
    verdict.explored["product_states"] = states.size();
    verdict.explored["occurrence_states"] = occ.n_states();

    if (conflict) {
        verdict.status = Status::Violated;
        verdict.witness_pair = std::move(conflict);
        if (!equiv_k(verdict.witness_pair->first, verdict.witness_pair->second, kappa) ||
            !a.accepts(verdict.witness_pair->first) || a.accepts(verdict.witness_pair->second))
            return ClosureVerdict::unknown("internal: product conflict failed validation");
        return verdict;
    }

    // datum-level search: a rejecting tree with the same datum as an accepted
    // one, possibly through non-co-reachable states.  Every accepting tree's
    // datum shows up in the product (its subtrees are all co-reachable), so
    // these queries cover every possible conflict.  One search per distinct
    // occurrence set serves all datums sharing it; small witnesses first.
    bool all_conclusive = complete;
    std::map<std::vector<int>, std::vector<std::pair<int, int>>> by_occ_set;  // (root_type, member)
    for (const auto& [occ_state, slot] : seen) {
        if (slot.first < 0) continue;  // no accepting tree with this datum
        const auto& st = occ.state(occ_state);
        by_occ_set[st.occ].emplace_back(st.root_type, slot.first);
    }
    std::vector<const std::pair<const std::vector<int>, std::vector<std::pair<int, int>>>*> groups;
    for (const auto& entry : by_occ_set) groups.push_back(&entry);
    auto group_size = [&](const auto* g) {
        std::uint64_t best = ~0ull;
        for (const auto& [rt, member_id] : g->second) best = std::min(best, derivs[member_id].size);
        return best;
    };
    std::sort(groups.begin(), groups.end(),
              [&](const auto* x, const auto* y) { return group_size(x) < group_size(y); });

    Budget per_search = budget;
    per_search.max_steps = std::min<std::uint64_t>(budget.max_steps / 4 + 1, 4000000);
    per_search.max_product_states = std::min<std::uint64_t>(budget.max_product_states, 20000);
    std::set<std::vector<int>> queried;
    auto report_violation = [&](Tree member, Tree other) -> std::optional<ClosureVerdict> {
        verdict.status = Status::Violated;
        verdict.witness_pair = std::make_pair(member, other);
        if (!equiv_k(member, other, kappa) || !a.accepts(member) || a.accepts(other))
            return ClosureVerdict::unknown("internal: conforming conflict failed validation");
        verdict.explored["conforming_steps"] = steps;
        return verdict;
    };
    for (const auto* group : groups) {
        const auto& [occ_set, targets] = *group;
        if (steps > budget.max_steps) {
            all_conclusive = false;
            break;
        }
        queried.insert(occ_set);
        ConformingSearch search{a, occ, occ_set, {}, false, std::nullopt};
        for (const auto& [rt, member_id] : targets) search.goal_root_types.insert(rt);
        std::uint64_t local_steps = 0;
        search.run(per_search, local_steps);
        steps += local_steps;
        if (search.found_tree) {
            auto [other, rt] = *search.found_tree;
            int member_id = -1;
            for (const auto& [trt, mid] : targets)
                if (trt == rt) member_id = mid;
            if (auto v = report_violation(build(member_id), other)) return *v;
        }
        if (!search.conclusive) all_conclusive = false;
    }

    // stage 3 — when the exploration was cut, probe data of derived accepting
    // trees: minimal witnesses and random derivations, each also pumped by
    // state loops so neighbourhood windows saturate.  Conflicts found this
    // way are verified like the rest.
    if (!all_conclusive) {
        DerivationSampler sampler(a, 0x5eedu + static_cast<std::uint64_t>(kappa));
        std::uint64_t sample_steps = 0;
        std::optional<ClosureVerdict> out;
        auto probe = [&](const Tree& t) -> bool {
            if (!t || !a.accepts(t)) return false;
            sample_steps += tree_size(t);
            int os_id = occ.eval(t);
            const auto& datum = occ.state(os_id);
            if (!queried.insert(datum.occ).second) return false;
            ConformingSearch search{a, occ, datum.occ, {datum.root_type}, false, std::nullopt};
            std::uint64_t local_steps = 0;
            search.run(per_search, local_steps);
            sample_steps += local_steps;
            if (search.found_tree) {
                out = report_violation(t, search.found_tree->first);
                return out.has_value();
            }
            return false;
        };
        auto probe_with_pump = [&](const Tree& t) -> bool {
            if (!t) return false;
            if (probe(t)) return true;
            return probe(pump_state_loops(a, reach, t, kappa + 1));
        };
        for (int q = 0; q < a.n_states(); ++q) {
            if (!reach.reachable[q] || !a.is_final(q)) continue;
            if (probe_with_pump(reach.witness[q])) return *out;
        }
        for (int trial = 0; trial < 400 && sample_steps < budget.max_steps; ++trial) {
            Tree t = sampler.sample_accepting(4 + (trial % 44));
            if (!t) break;
            if (probe_with_pump(t)) return *out;
        }
        steps += sample_steps;
    }
    verdict.explored["conforming_steps"] = steps;

    if (all_conclusive) {
        verdict.status = Status::Holds;
        return verdict;
    }
    return ClosureVerdict::unknown("product or conforming search exceeded budget");
}

BigUint kappa_bound(const Dfta& a, int k) {
    return count_ktypes(a.alphabet(), k) + BigUint(static_cast<std::uint64_t>(k) + 1);
}

LtVerdict decide_lt(const Dfta& a_in, const DecideLtLimits& limits) {
    Dfta a = minimize(a_in);
    LtVerdict verdict;
    std::int64_t k0 = tameness_bound_k0(a);
    verdict.explored["k0"] = static_cast<std::uint64_t>(k0);

    // (1) tameness: scan small k, then the bound
    std::optional<int> tame_at;
    bool tame_unknown = false;
    for (int k = 0; k <= limits.tame_scan_max && k < k0; ++k) {
        ClosureVerdict v = is_k_tame(a, k, limits.budget);
        if (v.status == Status::Holds) {
            tame_at = k;
            break;
        }
        if (v.status == Status::Unknown) tame_unknown = true;
    }
    if (!tame_at) {
        if (k0 <= std::numeric_limits<int>::max()) {
            ClosureVerdict v = is_k_tame(a, static_cast<int>(k0), limits.budget);
            if (v.status == Status::Violated) {
                verdict.status = LtStatus::NotLT;
                verdict.reason = LtReason::NotTame;
                verdict.closure_witness = v.witness;
                verdict.via = "closure violation at k0=" + std::to_string(k0);
                return verdict;
            }
            if (v.status == Status::Holds) tame_at = static_cast<int>(k0);
            if (v.status == Status::Unknown) tame_unknown = true;
        } else {
            tame_unknown = true;
        }
    }
    if (tame_at) verdict.tame_at_k = tame_at;

    // (2) the exact bound path, when the bound is within reach
    if (tame_at) {
        BigUint bound = kappa_bound(a, *tame_at);
        if (bound.fits_u64() && bound.to_u64() <= static_cast<std::uint64_t>(limits.max_kappa)) {
            int kappa = static_cast<int>(bound.to_u64());
            ClosureVerdict v = is_kappa_testable(a, kappa, limits.budget);
            if (v.status == Status::Holds) {
                verdict.status = LtStatus::LT;
                verdict.reason = LtReason::TestableAt;
                verdict.kappa = kappa;
                verdict.via = "testable at kappa*=" + std::to_string(kappa);
                return verdict;
            }
            if (v.status == Status::Violated) {
                // tame and not testable at the computed bound: not LT
                verdict.status = LtStatus::NotLT;
                verdict.reason = LtReason::BoundCheckFailed;
                verdict.kappa = kappa;
                verdict.via = "tame at k=" + std::to_string(*tame_at) +
                              " but not testable at kappa*=" + std::to_string(kappa);
                if (v.witness_pair) {
                    verdict.witness_terms.push_back(render_tree(v.witness_pair->first, a.alphabet()));
                    verdict.witness_terms.push_back(render_tree(v.witness_pair->second, a.alphabet()));
                }
                return verdict;
            }
        }
    }

    // (3) bounded scan; a Holds here is sound regardless of tameness
    for (int kappa = 0; kappa <= limits.max_kappa; ++kappa) {
        ClosureVerdict v = is_kappa_testable(a, kappa, limits.budget);
        if (v.status == Status::Holds) {
            verdict.status = LtStatus::LT;
            verdict.reason = LtReason::TestableAt;
            verdict.kappa = kappa;
            verdict.via = "testable found by scan";
            return verdict;
        }
    }

    verdict.status = LtStatus::Unknown;
    verdict.reason = LtReason::BudgetExceeded;
    verdict.via = tame_unknown ? "tameness and testability both inconclusive within budgets"
                               : "testability inconclusive within budgets";
    return verdict;
}

}  // namespace ltt
