#include "ltt/unranked.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <limits>
#include <random>

#include <json.hpp>

namespace ltt {

int unranked_compare(const UnrankedTree& a, const UnrankedTree& b) {
    if (a.get() == b.get()) return 0;
    if (a->label != b->label) return a->label < b->label ? -1 : 1;
    std::size_t n = std::min(a->children.size(), b->children.size());
    for (std::size_t i = 0; i < n; ++i) {
        int r = unranked_compare(a->children[i], b->children[i]);
        if (r) return r;
    }
    if (a->children.size() != b->children.size())
        return a->children.size() < b->children.size() ? -1 : 1;
    return 0;
}

bool unranked_equal(const UnrankedTree& a, const UnrankedTree& b) {
    return unranked_compare(a, b) == 0;
}

UnrankedTree make_unode(int label, std::vector<UnrankedTree> children) {
    std::sort(children.begin(), children.end(),
              [](const UnrankedTree& x, const UnrankedTree& y) { return unranked_compare(x, y) < 0; });
    auto n = std::make_shared<UnrankedNode>();
    n->label = label;
    n->children = std::move(children);
    return n;
}

std::uint64_t unranked_size(const UnrankedTree& t) {
    std::uint64_t n = 1;
    for (const auto& c : t->children) n += unranked_size(c);
    return n;
}

int unranked_depth(const UnrankedTree& t) {
    int d = 0;
    for (const auto& c : t->children) d = std::max(d, 1 + unranked_depth(c));
    return d;
}

std::optional<int> UnrankedAlphabet::find(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (symbols[i] == name) return i;
    return std::nullopt;
}

namespace {

struct UParser {
    const std::string& text;
    const UnrankedAlphabet& alphabet;
    bool allow_port;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    UnrankedTree parse() {
        skip_ws();
        UnrankedTree t = term();
        skip_ws();
        if (pos != text.size()) throw ParseError("trailing input", pos);
        return t;
    }

    UnrankedTree term() {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unexpected end of input", pos);
        std::size_t start = pos;
        if (!std::isalpha(static_cast<unsigned char>(text[pos])) && text[pos] != '_')
            throw ParseError("expected symbol", pos);
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        std::string name = text.substr(start, pos - start);
        if (allow_port && name == "_" && !alphabet.find(name)) return make_unode(kUPortLabel);
        auto id = alphabet.find(name);
        if (!id) throw ParseError("unknown symbol '" + name + "'", start);
        std::vector<UnrankedTree> children;
        skip_ws();
        if (pos < text.size() && text[pos] == '{') {
            ++pos;
            skip_ws();
            if (pos < text.size() && text[pos] == '}') {
                ++pos;
            } else {
                while (true) {
                    children.push_back(term());
                    skip_ws();
                    if (pos >= text.size()) throw ParseError("missing '}'", pos);
                    if (text[pos] == ',') {
                        ++pos;
                        continue;
                    }
                    if (text[pos] == '}') {
                        ++pos;
                        break;
                    }
                    throw ParseError("expected ',' or '}'", pos);
                }
            }
        }
        return make_unode(*id, std::move(children));
    }
};

}  // namespace

UnrankedTree parse_unranked(const std::string& text, const UnrankedAlphabet& alphabet,
                            bool allow_port) {
    UParser p{text, alphabet, allow_port};
    return p.parse();
}

std::string render_unranked(const UnrankedTree& t, const UnrankedAlphabet& alphabet) {
    std::string out;
    std::function<void(const UnrankedTree&)> go = [&](const UnrankedTree& node) {
        if (node->label == kUPortLabel)
            out += '_';
        else
            out += alphabet.symbols.at(node->label);
        if (!node->children.empty()) {
            out += '{';
            for (std::size_t i = 0; i < node->children.size(); ++i) {
                if (i) out += ',';
                go(node->children[i]);
            }
            out += '}';
        }
    };
    go(t);
    return out;
}

const UnrankedTree& usubtree_at(const UnrankedTree& t, const NodePath& path) {
    const UnrankedTree* cur = &t;
    for (int step : path) {
        if (step < 0 || step >= static_cast<int>((*cur)->children.size()))
            throw std::out_of_range("invalid unranked path step");
        cur = &(*cur)->children[step];
    }
    return *cur;
}

UnrankedTree ureplace_at(const UnrankedTree& t, const NodePath& path, const UnrankedTree& sub) {
    if (path.empty()) return sub;
    int step = path[0];
    if (step < 0 || step >= static_cast<int>(t->children.size()))
        throw std::out_of_range("invalid unranked path step");
    std::vector<UnrankedTree> children = t->children;
    children[step] = ureplace_at(children[step], NodePath(path.begin() + 1, path.end()), sub);
    return make_unode(t->label, std::move(children));
}

namespace {
bool ufind_port_rec(const UnrankedTree& t, NodePath& path, std::optional<NodePath>& found) {
    if (t->label == kUPortLabel) {
        if (found) return false;
        found = path;
        return true;
    }
    for (std::size_t i = 0; i < t->children.size(); ++i) {
        path.push_back(static_cast<int>(i));
        if (!ufind_port_rec(t->children[i], path, found)) return false;
        path.pop_back();
    }
    return true;
}
}  // namespace

std::optional<NodePath> ufind_port(const UnrankedTree& t) {
    NodePath path;
    std::optional<NodePath> found;
    if (!ufind_port_rec(t, path, found)) throw std::invalid_argument("more than one port");
    return found;
}

UnrankedTree ugraft(const UnrankedTree& ctx, const UnrankedTree& sub) {
    auto port = ufind_port(ctx);
    if (!port) throw std::invalid_argument("ugraft: no port");
    return ureplace_at(ctx, *port, sub);
}

UnrankedTree ucontext_between(const UnrankedTree& t, const NodePath& x, const NodePath& y) {
    if (!path_is_prefix(x, y))
        throw std::invalid_argument("ucontext_between: y is not a descendant of x");
    const UnrankedTree& root = usubtree_at(t, x);
    NodePath rel(y.begin() + x.size(), y.end());
    return ureplace_at(root, rel, make_unode(kUPortLabel));
}

namespace {
UnrankedTree utruncate(const UnrankedTree& t, int d) {
    if (d == 0) return t->children.empty() ? t : make_unode(t->label);
    std::vector<UnrankedTree> kids;
    kids.reserve(t->children.size());
    for (const auto& c : t->children) kids.push_back(utruncate(c, d - 1));
    return make_unode(t->label, std::move(kids));  // re-sorts canonically
}
}  // namespace

bool utruncations_equal(const UnrankedTree& a, const UnrankedTree& b, int depth) {
    return unranked_equal(utruncate(a, depth), utruncate(b, depth));
}

int KLTypeRegistry::intern(int label, std::vector<std::pair<int, int>> counts) {
    std::sort(counts.begin(), counts.end());
    std::string key = std::to_string(label) + "|";
    for (auto& [tid, c] : counts) key += std::to_string(tid) + ":" + std::to_string(c) + ",";
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    int id = static_cast<int>(entries_.size());
    entries_.push_back({label, std::move(counts)});
    index_.emplace(std::move(key), id);
    return id;
}

int KLTypeRegistry::type_of(const UnrankedTree& t, int k) {
    auto memo_key = std::make_pair(t.get(), k);
    auto it = type_memo_.find(memo_key);
    if (it != type_memo_.end()) return it->second;
    std::vector<std::pair<int, int>> counts;
    if (k > 0) {
        std::map<int, int> by_type;
        for (const auto& c : t->children) {
            int ct = type_of(c, k - 1);
            by_type[ct] = std::min(by_type[ct] + 1, l_);
        }
        counts.assign(by_type.begin(), by_type.end());
    }
    int id = intern(t->label, std::move(counts));
    type_memo_.emplace(memo_key, id);
    return id;
}

int KLTypeRegistry::truncate(int id, int to_level) {
    if (to_level <= 0) return intern(entry(id).label, {});
    auto memo_key = std::make_pair(id, to_level);
    auto it = trunc_memo_.find(memo_key);
    if (it != trunc_memo_.end()) return it->second;
    const Entry e = entry(id);
    std::map<int, int> merged;
    for (const auto& [tid, c] : e.counts) {
        int tt = truncate(tid, to_level - 1);
        merged[tt] = std::min(merged[tt] + c, l_);
    }
    int out = intern(e.label, std::vector<std::pair<int, int>>(merged.begin(), merged.end()));
    trunc_memo_.emplace(memo_key, out);
    return out;
}

int kl_type_of(const UnrankedTree& t, const NodePath& x, int k, int l, KLTypeRegistry& reg) {
    if (reg.l() != l) throw std::invalid_argument("kl_type_of: registry threshold mismatch");
    return reg.type_of(usubtree_at(t, x), k);
}

std::set<int> kl_occurrence_set(const UnrankedTree& t, int k, KLTypeRegistry& reg) {
    std::set<int> out;
    std::function<void(const UnrankedTree&)> go = [&](const UnrankedTree& node) {
        out.insert(reg.type_of(node, k));
        for (const auto& c : node->children) go(c);
    };
    go(t);
    return out;
}

bool equiv_kl(const UnrankedTree& t1, const UnrankedTree& t2, int k, int l) {
    KLTypeRegistry reg(l);
    if (reg.type_of(t1, k) != reg.type_of(t2, k)) return false;
    return kl_occurrence_set(t1, k, reg) == kl_occurrence_set(t2, k, reg);
}

BigUint count_kl_types(int n_symbols, int k, int l) {
    if (n_symbols < 1 || l < 1 || k < 0) throw std::invalid_argument("count_kl_types: bad arguments");
    BigUint f(static_cast<std::uint64_t>(n_symbols));
    for (int j = 0; j < k; ++j) {
        if (!f.fits_u64()) throw std::overflow_error("count_kl_types: tower exceeds 2^64 exponent");
        f = BigUint(static_cast<std::uint64_t>(n_symbols)) *
            BigUint::pow(BigUint(static_cast<std::uint64_t>(l) + 1), f.to_u64());
    }
    return f;
}

// --------------------------------------------------------------- automaton

CountingDfta::CountingDfta(UnrankedAlphabet alphabet, int n_states, int m,
                           std::vector<bool> final_states, std::vector<std::vector<int>> delta)
    : alphabet_(std::move(alphabet)),
      n_states_(n_states),
      m_(m),
      final_(std::move(final_states)),
      delta_(std::move(delta)) {
    if (n_states_ < 1) throw std::invalid_argument("counting dfta: need at least one state");
    if (m_ < 1) throw std::invalid_argument("counting dfta: threshold m must be >= 1");
    if (static_cast<int>(final_.size()) != n_states_)
        throw std::invalid_argument("counting dfta: final vector size mismatch");
    std::size_t want = profile_count();
    if (static_cast<int>(delta_.size()) != alphabet_.size())
        throw std::invalid_argument("counting dfta: delta table count mismatch");
    for (const auto& table : delta_) {
        if (table.size() != want) throw std::invalid_argument("counting dfta: incomplete delta");
        for (int q : table)
            if (q < 0 || q >= n_states_)
                throw std::invalid_argument("counting dfta: transition target out of range");
    }
}

std::size_t CountingDfta::profile_count() const {
    std::size_t size = 1;
    for (int i = 0; i < n_states_; ++i) {
        size *= static_cast<std::size_t>(m_ + 1);
        if (size > (1u << 26)) throw std::invalid_argument("counting dfta: profile space too large");
    }
    return size;
}

std::size_t CountingDfta::profile_index(const std::vector<int>& counts) const {
    std::size_t idx = 0;
    for (int q = 0; q < n_states_; ++q) idx = idx * (m_ + 1) + static_cast<std::size_t>(counts[q]);
    return idx;
}

std::vector<int> CountingDfta::profile_of_children(const std::vector<int>& child_states) const {
    std::vector<int> counts(n_states_, 0);
    for (int q : child_states) counts[q] = std::min(counts[q] + 1, m_);
    return counts;
}

int CountingDfta::delta(int symbol, const std::vector<int>& profile_counts) const {
    return delta_[symbol][profile_index(profile_counts)];
}

int CountingDfta::run(const UnrankedTree& t) const {
    if (t->label < 0 || t->label >= alphabet_.size())
        throw std::invalid_argument("counting dfta: label outside alphabet");
    std::vector<int> child_states;
    child_states.reserve(t->children.size());
    for (const auto& c : t->children) child_states.push_back(run(c));
    return delta(t->label, profile_of_children(child_states));
}

std::vector<int> UReachability::states() const {
    std::vector<int> out;
    for (int q = 0; q < static_cast<int>(reachable.size()); ++q)
        if (reachable[q]) out.push_back(q);
    return out;
}

namespace {

// enumerate all profiles over the live states (counts 0..m for live, 0 else)
void for_each_profile(int n_states, int m, const std::vector<int>& live,
                      const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> counts(n_states, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == live.size()) {
            f(counts);
            return;
        }
        for (int c = 0; c <= m; ++c) {
            counts[live[i]] = c;
            rec(i + 1);
        }
        counts[live[i]] = 0;
    };
    rec(0);
}

}  // namespace

UReachability ureachable_states(const CountingDfta& a) {
    UReachability r;
    int n = a.n_states();
    r.reachable.assign(n, false);
    r.witness.assign(n, UnrankedTree());
    std::vector<std::uint64_t> size(n, 0);
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> live = r.states();
        for (int s = 0; s < a.alphabet().size(); ++s) {
            for_each_profile(n, a.threshold(), live, [&](const std::vector<int>& counts) {
                std::uint64_t sz = 1;
                std::vector<UnrankedTree> kids;
                for (int q = 0; q < n; ++q)
                    for (int c = 0; c < counts[q]; ++c) {
                        kids.push_back(r.witness[q]);
                        sz += size[q];
                    }
                int target = a.delta(s, counts);
                if (!r.reachable[target] || sz < size[target]) {
                    r.reachable[target] = true;
                    r.witness[target] = make_unode(s, std::move(kids));
                    size[target] = sz;
                    changed = true;
                }
            });
        }
    }
    return r;
}

CountingDfta minimize_counting(const CountingDfta& a) {
    UReachability reach = ureachable_states(a);
    std::vector<int> live = reach.states();
    int n = a.n_states();

    std::vector<int> block(n, -1);
    for (int q : live) block[q] = a.is_final(q) ? 1 : 0;
    bool stable = false;
    while (!stable) {
        std::map<std::vector<int>, int> sig_ids;
        std::vector<int> new_block(n, -1);
        for (int q : live) {
            std::vector<int> sig{block[q]};
            for (int s = 0; s < a.alphabet().size(); ++s) {
                for_each_profile(n, a.threshold(), live, [&](const std::vector<int>& counts) {
                    std::vector<int> bumped = counts;
                    bumped[q] = std::min(bumped[q] + 1, a.threshold());
                    sig.push_back(block[a.delta(s, bumped)]);
                });
            }
            auto [it, fresh] = sig_ids.emplace(std::move(sig), static_cast<int>(sig_ids.size()));
            new_block[q] = it->second;
        }
        std::set<int> olds, news;
        for (int q : live) {
            olds.insert(block[q]);
            news.insert(new_block[q]);
        }
        stable = olds.size() == news.size();
        block = std::move(new_block);
    }

    std::map<int, int> renumber;
    for (int q : live)
        if (!renumber.count(block[q])) {
            int next = static_cast<int>(renumber.size());
            renumber[block[q]] = next;
        }
    int nm = static_cast<int>(renumber.size());
    std::vector<bool> final(nm, false);
    std::vector<int> rep(nm, -1);
    for (int q : live) {
        int b = renumber[block[q]];
        if (a.is_final(q)) final[b] = true;
        if (rep[b] < 0) rep[b] = q;
    }
    // quotient transitions: expand a class profile by placing each class
    // count on its representative
    std::vector<std::vector<int>> delta(a.alphabet().size());
    std::vector<int> all(nm);
    for (int b = 0; b < nm; ++b) all[b] = b;
    std::size_t want = 1;
    for (int i = 0; i < nm; ++i) want *= a.threshold() + 1;
    for (int s = 0; s < a.alphabet().size(); ++s) delta[s].assign(want, 0);
    std::vector<int> class_counts(nm, 0);
    std::function<void(int)> fill = [&](int b) {
        if (b == nm) {
            std::vector<int> orig_counts(n, 0);
            for (int i = 0; i < nm; ++i) orig_counts[rep[i]] = class_counts[i];
            std::size_t idx = 0;
            for (int i = 0; i < nm; ++i) idx = idx * (a.threshold() + 1) + class_counts[i];
            for (int s = 0; s < a.alphabet().size(); ++s)
                delta[s][idx] = renumber[block[a.delta(s, orig_counts)]];
            return;
        }
        for (int c = 0; c <= a.threshold(); ++c) {
            class_counts[b] = c;
            fill(b + 1);
        }
        class_counts[b] = 0;
    };
    fill(0);
    return CountingDfta(a.alphabet(), nm, a.threshold(), std::move(final), std::move(delta));
}

bool counting_equivalent(const CountingDfta& a, const CountingDfta& b) {
    if (!(a.alphabet() == b.alphabet())) return false;
    // joint reachability of state pairs
    std::set<std::pair<int, int>> pairs;
    bool changed = true;
    std::uint64_t guard = 0;
    while (changed) {
        changed = false;
        std::vector<std::pair<int, int>> known(pairs.begin(), pairs.end());
        // combine children multisets: build pair profiles incrementally
        std::set<std::pair<std::vector<int>, std::vector<int>>> profiles;
        profiles.insert({std::vector<int>(a.n_states(), 0), std::vector<int>(b.n_states(), 0)});
        bool grew = true;
        while (grew) {
            grew = false;
            std::vector<std::pair<std::vector<int>, std::vector<int>>> snapshot(profiles.begin(),
                                                                                profiles.end());
            for (const auto& [pa, pb] : snapshot)
                for (const auto& [qa, qb] : known) {
                    auto na = pa;
                    auto nb = pb;
                    na[qa] = std::min(na[qa] + 1, a.threshold());
                    nb[qb] = std::min(nb[qb] + 1, b.threshold());
                    if (profiles.insert({na, nb}).second) grew = true;
                    if (++guard > 4000000) throw std::runtime_error("counting_equivalent: too large");
                }
        }
        for (int s = 0; s < a.alphabet().size(); ++s)
            for (const auto& [pa, pb] : profiles)
                if (pairs.emplace(a.delta(s, pa), b.delta(s, pb)).second) changed = true;
    }
    for (const auto& [qa, qb] : pairs)
        if (a.is_final(qa) != b.is_final(qb)) return false;
    return true;
}

std::optional<UnrankedTree> useparating_context(const CountingDfta& a, int q1, int q2) {
    if (q1 == q2) return std::nullopt;
    if (a.is_final(q1) != a.is_final(q2)) return make_unode(kUPortLabel);
    UReachability reach = ureachable_states(a);
    std::vector<int> live = reach.states();
    struct Step {
        int symbol;
        std::vector<int> counts;  // sibling profile
        int prev;
    };
    std::map<std::pair<int, int>, int> seen;
    std::vector<std::pair<int, int>> order{{q1, q2}};
    std::vector<Step> steps{{-1, {}, -1}};
    seen[{q1, q2}] = 0;
    int target = -1;
    for (std::size_t head = 0; head < order.size() && target < 0; ++head) {
        auto [x, y] = order[head];
        for (int s = 0; s < a.alphabet().size() && target < 0; ++s) {
            for_each_profile(a.n_states(), a.threshold(), live, [&](const std::vector<int>& counts) {
                if (target >= 0) return;
                auto cx = counts, cy = counts;
                cx[x] = std::min(cx[x] + 1, a.threshold());
                cy[y] = std::min(cy[y] + 1, a.threshold());
                int nx = a.delta(s, cx), ny = a.delta(s, cy);
                if (seen.count({nx, ny})) return;
                seen[{nx, ny}] = static_cast<int>(order.size());
                order.emplace_back(nx, ny);
                steps.push_back({s, counts, static_cast<int>(head)});
                if (a.is_final(nx) != a.is_final(ny)) target = static_cast<int>(order.size()) - 1;
            });
        }
    }
    if (target < 0) return std::nullopt;
    std::vector<int> chain;
    for (int at = target; at > 0; at = steps[at].prev) chain.push_back(at);
    std::reverse(chain.begin(), chain.end());
    UnrankedTree c = make_unode(kUPortLabel);
    for (int at : chain) {
        const Step& st = steps[at];
        std::vector<UnrankedTree> kids{c};
        for (int q = 0; q < a.n_states(); ++q)
            for (int i = 0; i < st.counts[q]; ++i) kids.push_back(reach.witness[q]);
        c = make_unode(st.symbol, std::move(kids));
    }
    return c;
}

CountingDfta random_counting_dfta(const UnrankedAlphabet& alphabet, int n_states, int m,
                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> state_dist(0, n_states - 1);
    std::size_t profiles = 1;
    for (int i = 0; i < n_states; ++i) profiles *= m + 1;
    std::vector<std::vector<int>> delta(alphabet.size());
    for (auto& table : delta) {
        table.resize(profiles);
        for (auto& q : table) q = state_dist(rng);
    }
    std::vector<bool> final(n_states);
    for (int q = 0; q < n_states; ++q) final[q] = rng() & 1;
    return CountingDfta(alphabet, n_states, m, std::move(final), std::move(delta));
}

namespace {

using ojson = nlohmann::ordered_json;

std::string tok_of(const nlohmann::json& j) {
    return j.is_string() ? j.get<std::string>() : std::to_string(j.get<long long>());
}

}  // namespace

CountingDfta load_counting_dfta(const std::string& json_text, bool complete_with_sink) {
    nlohmann::json doc = nlohmann::json::parse(json_text);
    UnrankedAlphabet alphabet;
    for (const auto& s : doc.at("alphabet"))
        alphabet.symbols.push_back(s.is_string() ? s.get<std::string>()
                                                 : s.at("symbol").get<std::string>());
    int m = doc.at("m").get<int>();
    if (m < 1) throw std::invalid_argument("counting dfta file: m must be >= 1");

    std::map<std::string, int> state_id;
    std::vector<std::string> names;
    for (const auto& s : doc.at("states")) {
        std::string t = tok_of(s);
        if (state_id.count(t)) throw std::invalid_argument("counting dfta file: duplicate state");
        state_id[t] = static_cast<int>(names.size());
        names.push_back(t);
    }
    int n = static_cast<int>(names.size());
    std::vector<bool> final(n, false);
    for (const auto& s : doc.at("final")) final[state_id.at(tok_of(s))] = true;

    int n_total = n + (complete_with_sink ? 1 : 0);
    std::size_t profiles = 1;
    for (int i = 0; i < n_total; ++i) {
        profiles *= m + 1;
        if (profiles > (1u << 26))
            throw std::invalid_argument("counting dfta file: profile space too large");
    }
    std::vector<std::vector<int>> delta(alphabet.size());
    for (auto& t : delta) t.assign(profiles, -1);

    auto parse_constraint = [&](const std::string& text) -> int {
        if (text.rfind(">=", 0) == 0) {
            int v = std::stoi(text.substr(2));
            if (v != m) throw std::invalid_argument("counting dfta file: >= must use m");
            return m;
        }
        if (text.rfind("=", 0) == 0) {
            int v = std::stoi(text.substr(1));
            if (v < 0 || v >= m) throw std::invalid_argument("counting dfta file: bad =k constraint");
            return v;
        }
        throw std::invalid_argument("counting dfta file: bad constraint " + text);
    };

    for (const auto& row : doc.at("delta")) {
        std::string sym_name = row.at("symbol").get<std::string>();
        auto sym = alphabet.find(sym_name);
        if (!sym) throw std::invalid_argument("counting dfta file: unknown symbol " + sym_name);
        std::vector<int> counts(n_total, 0);
        if (row.contains("profile"))
            for (const auto& entry : row.at("profile")) {
                int q = state_id.at(tok_of(entry.at("state")));
                counts[q] = parse_constraint(entry.at("constraint").get<std::string>());
            }
        int to = state_id.at(tok_of(row.at("to")));
        std::size_t idx = 0;
        for (int q = 0; q < n_total; ++q) idx = idx * (m + 1) + counts[q];
        if (delta[*sym][idx] >= 0 && delta[*sym][idx] != to)
            throw std::invalid_argument("counting dfta file: conflicting transitions");
        delta[*sym][idx] = to;
    }
    for (auto& table : delta)
        for (auto& q : table) {
            if (q < 0) {
                if (!complete_with_sink)
                    throw std::invalid_argument(
                        "counting dfta file: incomplete delta (use complete-with-sink)");
                q = n;
            }
        }
    if (complete_with_sink) final.push_back(false);
    return CountingDfta(std::move(alphabet), n_total, m, std::move(final), std::move(delta));
}

std::string save_counting_dfta(const CountingDfta& a) {
    ojson doc;
    doc["alphabet"] = ojson::array();
    for (const auto& s : a.alphabet().symbols) doc["alphabet"].push_back({{"symbol", s}});
    doc["m"] = a.threshold();
    doc["states"] = ojson::array();
    for (int q = 0; q < a.n_states(); ++q) doc["states"].push_back(q);
    doc["final"] = ojson::array();
    for (int q = 0; q < a.n_states(); ++q)
        if (a.is_final(q)) doc["final"].push_back(q);
    doc["delta"] = ojson::array();
    int n = a.n_states(), m = a.threshold();
    std::vector<int> counts(n, 0);
    std::function<void(int)> walk = [&](int q) {
        if (q == n) {
            for (int s = 0; s < a.alphabet().size(); ++s) {
                ojson profile = ojson::array();
                for (int i = 0; i < n; ++i) {
                    if (counts[i] == 0) continue;
                    std::string c = counts[i] == m ? ">=" + std::to_string(m)
                                                   : "=" + std::to_string(counts[i]);
                    profile.push_back({{"state", i}, {"constraint", c}});
                }
                doc["delta"].push_back({{"symbol", a.alphabet().symbols[s]},
                                        {"profile", profile},
                                        {"to", a.delta(s, counts)}});
            }
            return;
        }
        for (int c = 0; c <= m; ++c) {
            counts[q] = c;
            walk(q + 1);
        }
        counts[q] = 0;
    };
    walk(0);
    return doc.dump(2) + "\n";
}

}  // namespace ltt
