#include "ltt/tameness.hpp"

#include <algorithm>
#include <functional>
#include <limits>

#include "ltt/ktype.hpp"

namespace ltt {

namespace {

void for_each_tuple_n(int domain, int r, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> tuple(r, 0);
    if (r == 0) {
        f(tuple);
        return;
    }
    if (domain == 0) return;
    while (true) {
        f(tuple);
        int pos = r - 1;
        while (pos >= 0 && ++tuple[pos] == domain) tuple[pos--] = 0;
        if (pos < 0) break;
    }
}

}  // namespace

SharedTypePairs::SharedTypePairs(const Dfta& a, int k, std::uint64_t max_steps)
    : a_(a), k_(k), reach_(reachable_states(a)) {
    std::vector<int> live = reach_.states();
    int nl = static_cast<int>(live.size());

    // one step of the chain: all pairs (delta(s,u), delta(s,v)) whose child
    // pairs come from `from` (or anything over live states for the 0 level)
    auto apply_step = [&](const std::vector<std::pair<int, int>>& from, Level& out,
                          DerivMap& derivs) {
        for (int s = 0; s < a.alphabet().size(); ++s) {
            int ar = a.alphabet().arity(s);
            for_each_tuple_n(static_cast<int>(from.size()), ar, [&](const std::vector<int>& tuple) {
                if (++steps_ > max_steps) {
                    computed_ = false;
                    return;
                }
                std::vector<int> u(ar), v(ar);
                int cost = 0;
                std::vector<std::pair<int, int>> kids(ar);
                for (int i = 0; i < ar; ++i) {
                    kids[i] = from[tuple[i]];
                    u[i] = kids[i].first;
                    v[i] = kids[i].second;
                    if (u[i] != v[i]) ++cost;
                }
                auto key = std::make_pair(a.delta(s, u), a.delta(s, v));
                out.insert(key);
                auto it = derivs.find(key);
                if (it == derivs.end() || cost < it->second.cost)
                    derivs[key] = Deriv{s, kids, cost};
            });
            if (!computed_) return;
        }
    };

    // level 0: children unconstrained over live states
    std::vector<std::pair<int, int>> all_pairs;
    for (int i = 0; i < nl; ++i)
        for (int j = 0; j < nl; ++j) all_pairs.emplace_back(live[i], live[j]);
    levels_.emplace_back();
    derivs_.emplace_back();
    apply_step(all_pairs, levels_[0], derivs_[0]);

    while (computed_ && static_cast<int>(levels_.size()) - 1 < k_) {
        const Level& cur = levels_.back();
        std::vector<std::pair<int, int>> from(cur.begin(), cur.end());
        Level next;
        DerivMap nd;
        apply_step(from, next, nd);
        if (!computed_) break;
        if (next == cur) {
            stable_at_ = static_cast<int>(levels_.size()) - 1;
            derivs_fix_ = std::move(nd);
            break;
        }
        levels_.push_back(std::move(next));
        derivs_.push_back(std::move(nd));
    }
}

std::pair<Tree, Tree> SharedTypePairs::witness_at(int q1, int q2, int depth) {
    if (q1 == q2) return {reach_.witness[q1], reach_.witness[q1]};
    auto key = std::make_tuple(q1, q2, depth);
    auto it = wmemo_.find(key);
    if (it != wmemo_.end()) return it->second;

    const Deriv* d;
    if (depth == 0) {
        d = &derivs_[0].at({q1, q2});
    } else if (stable_at_ >= 0 && depth > stable_at_) {
        d = &derivs_fix_.at({q1, q2});
    } else {
        d = &derivs_.at(depth).at({q1, q2});
    }
    std::vector<Tree> kids1, kids2;
    for (const auto& [c1, c2] : d->children) {
        if (depth == 0) {
            kids1.push_back(reach_.witness[c1]);
            kids2.push_back(reach_.witness[c2]);
        } else {
            auto [t1, t2] = witness_at(c1, c2, depth - 1);
            kids1.push_back(t1);
            kids2.push_back(t2);
        }
    }
    built_nodes_ += 2;
    if (built_nodes_ > (1u << 24)) throw std::length_error("pair witness too large");
    auto result = std::make_pair(make_node(d->symbol, std::move(kids1)),
                                 make_node(d->symbol, std::move(kids2)));
    wmemo_.emplace(key, result);
    return result;
}

std::pair<Tree, Tree> SharedTypePairs::witness(int q1, int q2, std::uint64_t max_nodes) {
    auto result = witness_at(q1, q2, k_);
    if (tree_size(result.first) > max_nodes || tree_size(result.second) > max_nodes)
        throw std::length_error("pair witness too large");
    return result;
}

bool replay_flips(const Dfta& a, const OpInstance& w) {
    try {
        Tree t2 = apply_guarded(w.op, w.tree, w.nodes, w.k, true);
        return a.accepts(w.tree) != a.accepts(t2);
    } catch (const GuardError&) {
        return false;
    }
}

namespace {

// ---------------------------------------------------------------- horizontal

ClosureVerdict check_horizontal(GuardedOp op, const Dfta& a, int k, const Budget& budget) {
    ClosureVerdict verdict;
    SharedTypePairs p2(a, k, budget.max_steps);
    verdict.explored["pair_fixpoint_steps"] = p2.explored_steps();
    if (!p2.computed()) return ClosureVerdict::unknown("pair fixpoint exceeded max_steps");
    verdict.explored["shared_type_pairs"] = p2.pairs().size();

    bool witness_overflow = false;
    bool dist_incomplete = false;
    auto violated_with = [&](const std::vector<int>& assign_a, const std::vector<int>& assign_b,
                             int q1, int q2) -> std::optional<OpInstance> {
        HolesResult hr = holes_distinguishable(a, static_cast<int>(assign_a.size()), assign_a,
                                               assign_b, budget.max_steps);
        if (!hr.complete) dist_incomplete = true;
        if (!hr.distinguishable) return std::nullopt;
        Tree w1, w2;
        try {
            std::tie(w1, w2) = p2.witness(q1, q2, budget.max_witness_nodes);
        } catch (const std::length_error&) {
            witness_overflow = true;
            return std::nullopt;
        }
        std::vector<Tree> subs;
        if (op == GuardedOp::HSwap)
            subs = {w1, w2};
        else
            subs = {w1, w1, w2};
        auto [tree, paths] = fill_holes(hr.context, subs);
        OpInstance inst{op, tree, paths, k};
        if (!replay_flips(a, inst)) return std::nullopt;  // should not happen
        return inst;
    };

    for (const auto& [q1, q2] : p2.pairs()) {
        if (q1 == q2) continue;
        std::optional<OpInstance> inst;
        if (op == GuardedOp::HSwap) {
            if (q1 > q2) continue;  // symmetric
            inst = violated_with({q1, q2}, {q2, q1}, q1, q2);
        } else {
            inst = violated_with({q1, q1, q2}, {q1, q2, q2}, q1, q2);
        }
        if (inst) {
            verdict.status = Status::Violated;
            verdict.witness = std::move(inst);
            return verdict;
        }
    }
    if (witness_overflow)
        return ClosureVerdict::unknown("violation detected but witness exceeded max_witness_nodes");
    if (dist_incomplete)
        return ClosureVerdict::unknown("hole product exceeded max_steps");
    verdict.status = Status::Holds;
    return verdict;
}

// ---------------------------------------------------------------- vertical

struct VerticalWitnessParts {
    Tree delta1;  // outer context (the one removed/swapped first)
    Tree delta2;  // inner context; equal to delta1 for vstutter
    Tree base;
    int bad_state, good_state;  // differing run results (rewritten vs original)
};

std::optional<OpInstance> materialize_vertical(const Dfta& a, GuardedOp op, int k,
                                               const VerticalWitnessParts& parts) {
    auto port1 = find_port(parts.delta1);
    auto port2 = find_port(parts.delta2);
    if (!port1 || !port2) return std::nullopt;
    Tree t0 = graft(parts.delta1, graft(parts.delta2, parts.base));
    auto d = separating_context(a, parts.bad_state, parts.good_state);
    if (!d) return std::nullopt;
    auto dport = find_port(*d);
    Tree t = graft(*d, t0);
    NodePath x = *dport;
    NodePath y = x;
    y.insert(y.end(), port1->begin(), port1->end());
    NodePath z = y;
    z.insert(z.end(), port2->begin(), port2->end());
    OpInstance inst{op, t, {x, y, z}, k};
    if (!replay_flips(a, inst)) return std::nullopt;
    return inst;
}

// exact check on the typed-state and behavior fixpoints; sound for Violated
// even when the fixpoints are incomplete
std::optional<OpInstance> vertical_scan_typed(const Dfta& a, GuardedOp op, int k,
                                              const TypedStateSet& ts, BehaviorSet& bs,
                                              const Budget& budget, std::uint64_t& steps) {
    int n_types = ts.types().size();
    // type -> realized states, type -> behaviors looping on it (distinct maps)
    std::vector<std::vector<int>> loops(n_types);
    for (std::size_t bi = 1; bi < bs.size(); ++bi) {
        const auto& b = bs.behaviors()[bi];
        for (int tid = 0; tid < n_types; ++tid) {
            if (++steps > budget.max_steps) return std::nullopt;
            if (bs.apply_type(b, tid) == tid) loops[tid].push_back(static_cast<int>(bi));
        }
    }
    for (int tid = 0; tid < n_types; ++tid) {
        std::vector<int> states = ts.states_with_type(tid);
        if (states.empty()) continue;
        // dedup loop behaviors by state map
        std::map<std::vector<int>, int> distinct;
        for (int bi : loops[tid]) distinct.emplace(bs.behaviors()[bi].state_map, bi);

        if (op == GuardedOp::VStutter) {
            for (const auto& [smap, bi] : distinct) {
                for (int q : states) {
                    int q1 = smap[q], q2 = smap[smap[q]];
                    if (q1 == q2) continue;
                    Tree delta = bs.witness_context(bi);
                    auto idx = ts.find(q, tid);
                    if (!idx) continue;
                    auto inst = materialize_vertical(
                        a, op, k, {delta, delta, ts.witness(*idx), q2, q1});
                    if (inst) return inst;
                }
            }
        } else {  // VSwap
            for (auto it1 = distinct.begin(); it1 != distinct.end(); ++it1) {
                for (auto it2 = distinct.begin(); it2 != distinct.end(); ++it2) {
                    if (++steps > budget.max_steps) return std::nullopt;
                    const auto& f1 = it1->first;
                    const auto& f2 = it2->first;
                    for (int q : states) {
                        int u = f1[f2[q]], v = f2[f1[q]];
                        if (u == v) continue;
                        auto idx = ts.find(q, tid);
                        if (!idx) continue;
                        auto inst = materialize_vertical(a, op, k,
                                                         {bs.witness_context(it1->second),
                                                          bs.witness_context(it2->second),
                                                          ts.witness(*idx), u, v});
                        if (inst) return inst;
                    }
                }
            }
        }
    }
    return std::nullopt;
}

// ------------------------------------------------- deep-power violation search

// behavior monoid on states only (no type windows); used when the typed
// fixpoints do not fit the budget
struct StateMonoid {
    std::vector<std::vector<int>> maps;
    std::vector<int> outer, inner;  // composition provenance
    std::vector<Tree> elem;         // generator contexts
    std::vector<int> pdepth;
    int identity = -1;
    bool complete = true;

    Tree witness_context(int i) const {
        if (outer[i] < 0) return elem[i];
        return graft(witness_context(outer[i]), witness_context(inner[i]));
    }
};

StateMonoid build_state_monoid(const Dfta& a, const Reachability& reach, std::size_t max_elems,
                               std::uint64_t max_steps) {
    StateMonoid m;
    int n = a.n_states();
    std::map<std::vector<int>, int> dedup;
    auto add = [&](std::vector<int> smap, int out, int in, Tree ctx, int depth) {
        auto [it, fresh] = dedup.emplace(smap, static_cast<int>(m.maps.size()));
        if (fresh) {
            m.maps.push_back(std::move(smap));
            m.outer.push_back(out);
            m.inner.push_back(in);
            m.elem.push_back(std::move(ctx));
            m.pdepth.push_back(depth);
        }
        return it->second;
    };
    std::vector<int> id_map(n);
    for (int q = 0; q < n; ++q) id_map[q] = q;
    m.identity = add(id_map, -1, -1, make_port(), 0);

    std::vector<int> live = reach.states();
    std::uint64_t steps = 0;
    for (int s = 0; s < a.alphabet().size(); ++s) {
        int ar = a.alphabet().arity(s);
        if (ar == 0) continue;
        for (int pos = 0; pos < ar; ++pos) {
            for_each_tuple_n(static_cast<int>(live.size()), ar - 1, [&](const std::vector<int>& rest) {
                if (++steps > max_steps || m.maps.size() >= max_elems) {
                    m.complete = false;
                    return;
                }
                std::vector<int> smap(n);
                std::vector<int> tuple(ar);
                std::vector<Tree> kids(ar);
                for (int i = 0, j = 0; i < ar; ++i) {
                    if (i == pos) {
                        kids[i] = make_port();
                    } else {
                        tuple[i] = live[rest[j]];
                        kids[i] = reach.witness[tuple[i]];
                        ++j;
                    }
                }
                for (int q = 0; q < n; ++q) {
                    tuple[pos] = q;
                    smap[q] = a.delta(s, tuple);
                }
                add(std::move(smap), -1, -1, make_node(s, std::move(kids)), 1);
            });
        }
    }
    // composition closure
    for (std::size_t i = 1; i < m.maps.size(); ++i) {
        for (std::size_t j = 1; j <= i; ++j) {
            if (m.maps.size() >= max_elems || steps > max_steps) {
                m.complete = false;
                return m;
            }
            for (auto [o, in] : i == j ? std::vector<std::pair<std::size_t, std::size_t>>{{i, i}}
                                       : std::vector<std::pair<std::size_t, std::size_t>>{{i, j},
                                                                                          {j, i}}) {
                steps += n;
                std::vector<int> smap(n);
                for (int q = 0; q < n; ++q) smap[q] = m.maps[o][m.maps[in][q]];
                add(std::move(smap), static_cast<int>(o), static_cast<int>(in),
                    Tree(), m.pdepth[o] + m.pdepth[in]);
            }
        }
    }
    return m;
}

// when every state map in the complete monoid satisfies the condition at
// every reachable state, no typed instance can violate it
bool untyped_condition_holds(GuardedOp op, const StateMonoid& m, const std::vector<int>& live) {
    if (!m.complete) return false;
    if (op == GuardedOp::VStutter) {
        for (const auto& f : m.maps)
            for (int q : live)
                if (f[f[q]] != f[q]) return false;
        return true;
    }
    for (const auto& f1 : m.maps)
        for (const auto& f2 : m.maps)
            for (int q : live)
                if (f1[f2[q]] != f2[f1[q]]) return false;
    return true;
}

std::vector<int> compose_maps(const std::vector<int>& outer, const std::vector<int>& inner) {
    std::vector<int> r(inner.size());
    for (std::size_t q = 0; q < inner.size(); ++q) r[q] = outer[inner[q]];
    return r;
}

// all distinct powers f^E for E >= e_min, with one concrete exponent each
std::vector<std::pair<std::uint64_t, std::vector<int>>> powers_from(const std::vector<int>& f,
                                                                    std::uint64_t e_min) {
    // fast exponentiation to f^e_min
    std::vector<int> acc(f.size());
    for (std::size_t q = 0; q < f.size(); ++q) acc[q] = static_cast<int>(q);
    std::vector<int> base = f;
    std::uint64_t e = e_min;
    while (e) {
        if (e & 1) acc = compose_maps(base, acc);
        e >>= 1;
        if (e) base = compose_maps(base, base);
    }
    std::vector<std::pair<std::uint64_t, std::vector<int>>> out;
    std::map<std::vector<int>, bool> seen;
    std::uint64_t exp = e_min;
    while (!seen.count(acc)) {
        seen[acc] = true;
        out.emplace_back(exp, acc);
        acc = compose_maps(f, acc);
        ++exp;
        if (out.size() > 4096) break;  // functions on <= 64 states cycle long before this
    }
    return out;
}

Tree power_context(const Tree& ctx, std::uint64_t e, std::uint64_t max_nodes) {
    Tree out = make_port();
    std::uint64_t ctx_size = tree_size(ctx);
    if (e * ctx_size > max_nodes) throw std::length_error("power context too large");
    for (std::uint64_t i = 0; i < e; ++i) out = graft(out, ctx);
    return out;
}

std::optional<OpInstance> vertical_power_search(const Dfta& a, GuardedOp op, int k,
                                                const Reachability& reach, const Budget& budget) {
    StateMonoid m = build_state_monoid(a, reach, 400, budget.max_steps);
    std::vector<int> live = reach.states();
    std::uint64_t steps = 0;

    // candidate middles: identity plus every element (capped)
    std::size_t mid_cap = std::min<std::size_t>(m.maps.size(), 80);

    for (std::size_t h = 1; h < m.maps.size(); ++h) {
        if (m.pdepth[h] < 1) continue;
        std::uint64_t e_min =
            (static_cast<std::uint64_t>(k) + 1 + m.pdepth[h] - 1) / m.pdepth[h];
        auto epows = powers_from(m.maps[h], e_min);
        for (const auto& [E, emap] : epows) {
            for (std::size_t mid = 0; mid < mid_cap; ++mid) {
                std::vector<int> f1 = compose_maps(emap, compose_maps(m.maps[mid], emap));
                auto try_materialize = [&](const std::vector<int>& fa, const std::vector<int>& fb,
                                           std::size_t mida, std::size_t midb,
                                           std::uint64_t Ea, std::uint64_t Eb,
                                           const std::pair<std::uint64_t, std::vector<int>>& mpow,
                                           int r) -> std::optional<OpInstance> {
                    int q = mpow.second[r];
                    int u = fa[fb[q]], v = fb[fa[q]];
                    if (op == GuardedOp::VStutter) {
                        u = fa[fa[q]];
                        v = fa[q];
                    }
                    if (u == v) return std::nullopt;
                    try {
                        Tree hctx = m.witness_context(static_cast<int>(h));
                        Tree epow_a = power_context(hctx, Ea, budget.max_witness_nodes);
                        Tree delta1 = graft(graft(epow_a, mida == 0 ? make_port()
                                                                    : m.witness_context(
                                                                          static_cast<int>(mida))),
                                            epow_a);
                        Tree delta2;
                        if (op == GuardedOp::VStutter) {
                            delta2 = delta1;
                        } else {
                            Tree epow_b = power_context(hctx, Eb, budget.max_witness_nodes);
                            delta2 = graft(graft(epow_b, midb == 0 ? make_port()
                                                                   : m.witness_context(
                                                                         static_cast<int>(midb))),
                                           epow_b);
                        }
                        Tree base = graft(power_context(hctx, mpow.first, budget.max_witness_nodes),
                                          reach.witness[r]);
                        return materialize_vertical(a, op, k, {delta1, delta2, base, u, v});
                    } catch (const std::length_error&) {
                        return std::nullopt;
                    }
                };
                if (op == GuardedOp::VStutter) {
                    for (const auto& mpow : epows) {
                        for (int r : live) {
                            if (++steps > budget.max_steps) return std::nullopt;
                            auto inst = try_materialize(f1, f1, mid, mid, E, E, mpow, r);
                            if (inst) return inst;
                        }
                    }
                } else {
                    for (std::size_t mid2 = 0; mid2 < mid_cap; ++mid2) {
                        std::vector<int> f2 = compose_maps(emap, compose_maps(m.maps[mid2], emap));
                        for (const auto& mpow : epows) {
                            for (int r : live) {
                                if (++steps > budget.max_steps) return std::nullopt;
                                auto inst = try_materialize(f1, f2, mid, mid2, E, E, mpow, r);
                                if (inst) return inst;
                            }
                        }
                    }
                }
            }
        }
        if (steps > budget.max_steps) break;
    }
    return std::nullopt;
}

ClosureVerdict check_vertical(GuardedOp op, const Dfta& a, int k, const Budget& budget) {
    ClosureVerdict verdict;
    Reachability reach = reachable_states(a);

    // untyped sufficient condition: ignores guards entirely
    StateMonoid monoid = build_state_monoid(a, reach, 400, budget.max_steps);
    verdict.explored["state_monoid"] = monoid.maps.size();
    if (untyped_condition_holds(op, monoid, reach.states())) {
        verdict.status = Status::Holds;
        verdict.note = "holds for every state map";
        return verdict;
    }

    // gate the exact tier on the size of the type space
    bool type_space_small = false;
    try {
        BigUint space = count_ktypes(a.alphabet(), k);
        type_space_small = space.fits_u64() && space.to_u64() <= budget.max_typed_states;
    } catch (const std::overflow_error&) {
        type_space_small = false;
    }

    std::uint64_t steps = 0;
    if (type_space_small) {
        TypedStateSet ts(a, k, budget);
        verdict.explored["typed_states"] = ts.states().size();
        BehaviorSet bs(a, ts, budget);
        verdict.explored["behaviors"] = bs.size();
        auto inst = vertical_scan_typed(a, op, k, ts, bs, budget, steps);
        if (inst) {
            verdict.status = Status::Violated;
            verdict.witness = std::move(inst);
            return verdict;
        }
        if (ts.complete() && bs.complete() && steps <= budget.max_steps) {
            verdict.status = Status::Holds;
            return verdict;
        }
    }
    // sound violation search at any k
    auto inst = vertical_power_search(a, op, k, reach, budget);
    if (inst) {
        verdict.status = Status::Violated;
        verdict.witness = std::move(inst);
        return verdict;
    }
    return ClosureVerdict::unknown("typed fixpoint over budget and power search found no violation");
}

}  // namespace

ClosureVerdict closed_under_guarded(GuardedOp op, const Dfta& a_in, int k, const Budget& budget) {
    if (k < 0) throw std::invalid_argument("closure check: k must be >= 0");
    Dfta a = minimize(a_in);
    if (op == GuardedOp::HSwap || op == GuardedOp::HTransfer)
        return check_horizontal(op, a, k, budget);
    return check_vertical(op, a, k, budget);
}

ClosureVerdict is_k_tame(const Dfta& a_in, int k, const Budget& budget) {
    Dfta a = minimize(a_in);
    ClosureVerdict result;
    result.status = Status::Holds;
    for (GuardedOp op :
         {GuardedOp::HSwap, GuardedOp::HTransfer, GuardedOp::VSwap, GuardedOp::VStutter}) {
        ClosureVerdict v = op == GuardedOp::HSwap || op == GuardedOp::HTransfer
                               ? check_horizontal(op, a, k, budget)
                               : check_vertical(op, a, k, budget);
        for (const auto& [key, val] : v.explored)
            result.explored[to_string(op) + "." + key] = val;
        if (v.status == Status::Violated) {
            v.explored = result.explored;
            return v;
        }
        if (v.status == Status::Unknown) {
            result.status = Status::Unknown;
            result.note += to_string(op) + ": " + v.note + "; ";
        }
    }
    return result;
}

std::int64_t tameness_bound_k0(const Dfta& a) {
    std::int64_t n = minimize(a).n_states();
    return n * n * n + 1;
}

TameResult is_tame(const Dfta& a_in, const Budget& budget) {
    Dfta a = minimize(a_in);
    TameResult result;
    result.k0 = tameness_bound_k0(a);

    for (int k = 0; k <= 3 && k < result.k0; ++k) {
        ClosureVerdict v = is_k_tame(a, k, budget);
        if (v.status == Status::Holds) {
            result.verdict = std::move(v);
            result.verdict.note = "holds at k=" + std::to_string(k) + " (monotone up to k0)";
            result.certified_k = k;
            return result;
        }
    }
    if (result.k0 > std::numeric_limits<int>::max())
        throw std::invalid_argument("k0 bound does not fit an int");
    ClosureVerdict v = is_k_tame(a, static_cast<int>(result.k0), budget);
    if (v.status == Status::Holds) result.certified_k = static_cast<int>(result.k0);
    result.verdict = std::move(v);
    return result;
}

}  // namespace ltt
