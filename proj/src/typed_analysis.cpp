#include "ltt/typed_analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_map>

namespace ltt {

namespace {

// enumerate tuples over indices [0, n) where at least one slot equals pivot
// and the rest are < limit; calls f once per tuple
void for_each_pivot_tuple(int r, int pivot, int limit,
                          const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> tuple(r);
    std::function<void(int, bool)> rec = [&](int pos, bool used) {
        if (pos == r) {
            if (used) f(tuple);
            return;
        }
        int hi = limit;
        for (int v = 0; v < hi; ++v) {
            tuple[pos] = v;
            rec(pos + 1, used || v == pivot);
        }
    };
    rec(0, false);
}

}  // namespace

TypedStateSet::TypedStateSet(const Dfta& a, int k, const Budget& budget) : k_(k), types_(k) {
    if (k < 0) throw std::invalid_argument("typed states: k must be >= 0");
    const RankedAlphabet& alphabet = a.alphabet();

    std::map<std::string, int> facet_index;  // key: state|shape
    auto facet_shape = [&](const Tree& type_shape) {
        return k_ == 0 ? Tree() : truncate(type_shape, k_ - 1);
    };
    auto facet_key = [&](int state, const Tree& shape) {
        return std::to_string(state) + "|" + (shape ? shape_key(shape) : std::string());
    };

    auto add = [&](int state, const Tree& type_shape, const Tree& witness) {
        int tid = types_.intern(type_shape);
        auto [it, fresh] = index_.emplace(std::make_pair(state, tid), static_cast<int>(list_.size()));
        if (fresh) {
            list_.push_back({state, tid});
            witnesses_.push_back(witness);
        }
        Tree fshape = facet_shape(type_shape);
        std::string fkey = facet_key(state, fshape);
        if (!facet_index.count(fkey)) {
            facet_index.emplace(fkey, static_cast<int>(facets_.size()));
            facets_.push_back({state, fshape, witness});
        }
    };

    // process facets one at a time; tuples enumerate facets known so far
    std::size_t processed = 0;
    // leaves first
    for (int s = 0; s < alphabet.size(); ++s) {
        if (alphabet.arity(s) != 0) continue;
        Tree leaf = make_node(s);
        add(a.delta(s, {}), leaf, leaf);
    }
    while (processed < facets_.size()) {
        if (list_.size() > budget.max_typed_states || steps_ > budget.max_steps) {
            complete_ = false;
            break;
        }
        int pivot = static_cast<int>(processed);
        ++processed;
        int known = static_cast<int>(processed);
        for (int s = 0; s < alphabet.size(); ++s) {
            int ar = alphabet.arity(s);
            if (ar == 0) continue;
            for_each_pivot_tuple(ar, pivot, known, [&](const std::vector<int>& tuple) {
                ++steps_;
                if (list_.size() > budget.max_typed_states || steps_ > budget.max_steps) return;
                std::vector<int> child_states(ar);
                std::vector<Tree> shapes(ar), kids(ar);
                for (int i = 0; i < ar; ++i) {
                    const Facet& f = facets_[tuple[i]];
                    child_states[i] = f.state;
                    shapes[i] = f.shape;
                    kids[i] = f.witness;
                }
                int target = a.delta(s, child_states);
                Tree type_shape =
                    k_ == 0 ? make_node(s) : make_node(s, std::move(shapes));
                add(target, type_shape, make_node(s, std::move(kids)));
            });
        }
    }
    if (list_.size() > budget.max_typed_states || steps_ > budget.max_steps) complete_ = false;
}

std::optional<int> TypedStateSet::find(int state, int type_id) const {
    auto it = index_.find({state, type_id});
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::vector<int> TypedStateSet::states_with_type(int type_id) const {
    std::vector<int> out;
    for (const auto& ts : list_)
        if (ts.type_id == type_id) out.push_back(ts.state);
    return out;
}

BehaviorSet::BehaviorSet(const Dfta& a, const TypedStateSet& ts, const Budget& budget)
    : ts_(ts), types_(ts.types()) {
    const RankedAlphabet& alphabet = a.alphabet();
    int n = a.n_states();
    int k = ts.k();

    std::map<std::string, int> dedup;
    auto key_of = [&](const std::vector<int>& smap, const Tree& window) {
        std::string key;
        for (int q : smap) {
            key += std::to_string(q);
            key += ',';
        }
        key += '|';
        key += shape_key(window);
        return key;
    };
    auto add = [&](Behavior b) -> bool {
        std::string key = key_of(b.state_map, b.window);
        auto [it, fresh] = dedup.emplace(std::move(key), static_cast<int>(list_.size()));
        if (fresh) list_.push_back(std::move(b));
        return fresh;
    };

    // identity behavior: the empty context
    {
        Behavior id;
        id.state_map.resize(n);
        for (int q = 0; q < n; ++q) id.state_map[q] = q;
        id.window = make_port();
        id.has_port = true;
        id.elementary = make_port();
        id.principal_depth = 0;
        add(std::move(id));
    }

    // single-node behaviors: one slot is the hole, others carry realized facets
    const auto& facets = ts.facets();
    for (int s = 0; s < alphabet.size(); ++s) {
        int ar = alphabet.arity(s);
        if (ar == 0) continue;
        for (int pos = 0; pos < ar; ++pos) {
            std::vector<int> side_idx(ar - 1, 0);
            bool done = ar == 1 ? false : facets.empty();
            while (!done) {
                Behavior b;
                b.state_map.resize(n);
                std::vector<Tree> window_kids(ar), ctx_kids(ar);
                std::vector<int> child_states(ar, -1);
                for (int i = 0, j = 0; i < ar; ++i) {
                    if (i == pos) {
                        window_kids[i] = make_port();
                        ctx_kids[i] = make_port();
                    } else {
                        const auto& f = facets[side_idx[j]];
                        child_states[i] = f.state;
                        window_kids[i] = f.shape ? f.shape : make_node(0);
                        ctx_kids[i] = f.witness;
                        ++j;
                    }
                }
                for (int q = 0; q < n; ++q) {
                    child_states[pos] = q;
                    b.state_map[q] = a.delta(s, child_states);
                }
                b.window = truncate(make_node(s, window_kids), k);
                b.has_port = find_port(b.window).has_value();
                b.elementary = make_node(s, ctx_kids);
                b.principal_depth = 1;
                ++steps_;
                add(std::move(b));
                if (list_.size() > budget.max_behaviors || steps_ > budget.max_steps) {
                    complete_ = false;
                    return;
                }
                // advance side assignment
                int p = ar - 2;
                while (p >= 0 && ++side_idx[p] == static_cast<int>(facets.size())) side_idx[p--] = 0;
                done = p < 0 || ar == 1;
            }
        }
    }

    // composition closure: process each behavior against all earlier ones
    // (and itself)
    for (std::size_t i = 1; i < list_.size(); ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            for (auto [outer, inner] : (i == j ? std::vector<std::pair<std::size_t, std::size_t>>{{i, i}}
                                               : std::vector<std::pair<std::size_t, std::size_t>>{
                                                     {i, j}, {j, i}})) {
                steps_ += n;
                Behavior c;
                const Behavior& bo = list_[outer];
                const Behavior& bi = list_[inner];
                c.state_map.resize(n);
                for (int q = 0; q < n; ++q) c.state_map[q] = bo.state_map[bi.state_map[q]];
                c.window = bo.has_port ? truncate(graft(bo.window, bi.window), ts_.k()) : bo.window;
                c.has_port = bo.has_port && bi.has_port && find_port(c.window).has_value();
                c.outer = static_cast<int>(outer);
                c.inner = static_cast<int>(inner);
                c.principal_depth = bo.principal_depth + bi.principal_depth;
                add(std::move(c));
                if (list_.size() > budget.max_behaviors || steps_ > budget.max_steps) {
                    complete_ = false;
                    return;
                }
            }
        }
    }
}

int BehaviorSet::apply_type(const Behavior& b, int type_id) {
    if (!b.has_port) return types_.intern(b.window);
    Tree image = truncate(graft(b.window, types_.shape(type_id)), ts_.k());
    return types_.intern(image);
}

std::optional<TypedState> BehaviorSet::apply(int behavior_idx, const TypedState& in) {
    if (!ts_.find(in.state, in.type_id)) return std::nullopt;  // defined on realized only
    const Behavior& b = list_.at(behavior_idx);
    return TypedState{b.state_map[in.state], apply_type(b, in.type_id)};
}

Tree BehaviorSet::witness_context(int behavior_idx) const {
    const Behavior& b = list_.at(behavior_idx);
    if (b.outer < 0) return b.elementary;
    return graft(witness_context(b.outer), witness_context(b.inner));
}

HolesResult holes_distinguishable(const Dfta& a, int holes, const std::vector<int>& assign_a,
                                  const std::vector<int>& assign_b, std::uint64_t max_steps) {
    if (holes < 1 || holes > 3) throw std::invalid_argument("holes_distinguishable: 1..3 holes");
    if (static_cast<int>(assign_a.size()) != holes || static_cast<int>(assign_b.size()) != holes)
        throw std::invalid_argument("holes_distinguishable: assignment size mismatch");
    const RankedAlphabet& alphabet = a.alphabet();

    struct PState {
        int qa, qb, usage;
    };
    struct Deriv {
        int symbol;                 // or -1-h for hole h
        std::vector<int> children;  // product-state ids
    };
    std::map<std::tuple<int, int, int>, int> index;
    std::vector<PState> states;
    std::vector<Deriv> derivs;
    auto usage_add = [&](int u1, int u2) {
        int out = 0, base = 1;
        for (int i = 0; i < holes; ++i) {
            int d1 = (u1 / base) % 3 + (u2 / base) % 3;
            out += std::min(d1, 2) * base;
            base *= 3;
        }
        return out;
    };
    auto intern = [&](int qa, int qb, int usage, Deriv d) {
        auto [it, fresh] =
            index.emplace(std::make_tuple(qa, qb, usage), static_cast<int>(states.size()));
        if (fresh) {
            states.push_back({qa, qb, usage});
            derivs.push_back(std::move(d));
        }
        return std::make_pair(it->second, fresh);
    };

    int all_ones = 0;
    {
        int base = 1;
        for (int i = 0; i < holes; ++i) {
            all_ones += base;
            base *= 3;
        }
    }

    int target = -1;
    auto note_target = [&](int id) {
        const PState& st = states[id];
        if (st.usage == all_ones && a.is_final(st.qa) != a.is_final(st.qb)) target = id;
    };
    // seeds: hole leaves and nullary symbols
    for (int h = 0; h < holes && target < 0; ++h) {
        int base = 1;
        for (int i = 0; i < h; ++i) base *= 3;
        auto [id, fresh] = intern(assign_a[h], assign_b[h], base, {-1 - h, {}});
        if (fresh) note_target(id);
    }
    for (int s = 0; s < alphabet.size() && target < 0; ++s)
        if (alphabet.arity(s) == 0) {
            int q = a.delta(s, {});
            intern(q, q, 0, {s, {}});
        }

    std::uint64_t steps = 0;
    for (std::size_t head = 0; head < states.size() && target < 0; ++head) {
        int known = static_cast<int>(head) + 1;
        for (int s = 0; s < alphabet.size() && target < 0; ++s) {
            int ar = alphabet.arity(s);
            if (ar == 0) continue;
            for_each_pivot_tuple(ar, static_cast<int>(head), known, [&](const std::vector<int>& tuple) {
                if (target >= 0) return;
                if (++steps > max_steps) return;
                std::vector<int> ca(ar), cb(ar);
                int usage = 0;
                for (int i = 0; i < ar; ++i) {
                    ca[i] = states[tuple[i]].qa;
                    cb[i] = states[tuple[i]].qb;
                    usage = usage_add(usage, states[tuple[i]].usage);
                }
                int qa = a.delta(s, ca), qb = a.delta(s, cb);
                auto [id, fresh] = intern(qa, qb, usage, {s, tuple});
                if (fresh) note_target(id);
            });
            if (steps > max_steps) break;
        }
        if (steps > max_steps) break;
    }

    HolesResult result;
    result.complete = steps <= max_steps;
    if (target < 0) return result;
    result.distinguishable = true;
    // materialize the hole-marked tree
    std::function<Tree(int)> build = [&](int id) -> Tree {
        const Deriv& d = derivs[id];
        if (d.symbol < 0) return make_node(hole_label(-1 - d.symbol));
        std::vector<Tree> kids;
        kids.reserve(d.children.size());
        for (int c : d.children) kids.push_back(build(c));
        return make_node(d.symbol, std::move(kids));
    };
    result.context = build(target);
    return result;
}

std::pair<Tree, std::vector<NodePath>> fill_holes(const Tree& marked, const std::vector<Tree>& subs) {
    std::vector<NodePath> paths(subs.size());
    std::function<Tree(const Tree&, NodePath&)> walk = [&](const Tree& node, NodePath& path) -> Tree {
        if (is_hole_label(node->label)) {
            int h = hole_index(node->label);
            if (h < 0 || h >= static_cast<int>(subs.size()))
                throw std::invalid_argument("fill_holes: hole index out of range");
            paths[h] = path;
            return subs[h];
        }
        std::vector<Tree> kids;
        kids.reserve(node->children.size());
        for (std::size_t i = 0; i < node->children.size(); ++i) {
            path.push_back(static_cast<int>(i));
            kids.push_back(walk(node->children[i], path));
            path.pop_back();
        }
        return make_node(node->label, std::move(kids));
    };
    NodePath p;
    Tree filled = walk(marked, p);
    return {filled, paths};
}

}  // namespace ltt
