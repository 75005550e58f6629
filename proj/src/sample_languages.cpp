#include "ltt/sample_languages.hpp"

#include <map>

namespace ltt {

namespace {

std::size_t pow_size(int n, int a) {
    std::size_t s = 1;
    while (a--) s *= static_cast<std::size_t>(n);
    return s;
}

// convenience builder: delta as a function over (symbol, children)
Dfta build(const RankedAlphabet& alphabet, int n_states, const std::vector<bool>& final,
           const std::function<int(int, const std::vector<int>&)>& f) {
    std::vector<std::vector<int>> delta(alphabet.size());
    for (int s = 0; s < alphabet.size(); ++s) {
        int ar = alphabet.arity(s);
        delta[s].resize(pow_size(n_states, ar));
        std::vector<int> tuple(ar, 0);
        for (std::size_t idx = 0; idx < delta[s].size(); ++idx) {
            std::size_t rest = idx;
            for (int i = ar - 1; i >= 0; --i) {
                tuple[i] = static_cast<int>(rest % n_states);
                rest /= n_states;
            }
            delta[s][idx] = f(s, tuple);
        }
    }
    return Dfta(alphabet, n_states, final, std::move(delta));
}

}  // namespace

Dfta make_universal(const RankedAlphabet& alphabet) {
    return build(alphabet, 1, {true}, [](int, const std::vector<int>&) { return 0; });
}

Dfta make_empty(const RankedAlphabet& alphabet) {
    return build(alphabet, 1, {false}, [](int, const std::vector<int>&) { return 0; });
}

Dfta make_even_b() {
    RankedAlphabet alphabet({{"a", 2}, {"b", 0}, {"c", 0}});
    // state = number of b leaves mod 2; final = even
    return build(alphabet, 2, {true, false}, [&](int s, const std::vector<int>& kids) {
        if (alphabet.name(s) == "b") return 1;
        if (alphabet.name(s) == "c") return 0;
        return (kids[0] + kids[1]) % 2;
    });
}

Dfta make_left_even_b() {
    RankedAlphabet alphabet({{"a", 2}, {"b", 0}, {"c", 0}});
    // states: (own parity, left-child parity or none): 0=(e,-) 1=(o,-)
    // 2=(e,e) 3=(e,o) 4=(o,e) 5=(o,o); final: left child even
    auto parity = [](int q) { return q == 1 || q == 4 || q == 5 ? 1 : 0; };
    return build(alphabet, 6, {false, false, true, false, true, false},
                 [&](int s, const std::vector<int>& kids) {
                     if (alphabet.name(s) == "b") return 1;
                     if (alphabet.name(s) == "c") return 0;
                     int own = (parity(kids[0]) + parity(kids[1])) % 2;
                     int left = parity(kids[0]);
                     return 2 + own * 2 + left;
                 });
}

Dfta make_three_branch_language() {
    RankedAlphabet alphabet(
        {{"a", 3}, {"b", 1}, {"c", 1}, {"cp", 1}, {"d", 1}, {"h1", 0}, {"h2", 0}, {"h3", 0}});
    // branch states: 0..2 = d-run over leaf i (h_i d*), 3..5 = c branch with
    // leaf i (b* c d* h_i), 6..8 = c' branch with leaf i, 9 = junk,
    // 10 = accepting root, 11 = rejecting root
    const int kJunk = 9, kAcc = 10, kRej = 11;
    auto leaf_of = [&](int q) { return q % 3; };
    std::vector<bool> final(12, false);
    final[kAcc] = true;
    return build(alphabet, 12, final, [&](int s, const std::vector<int>& kids) -> int {
        const std::string& name = alphabet.name(s);
        if (name == "h1") return 0;
        if (name == "h2") return 1;
        if (name == "h3") return 2;
        int q = kids.empty() ? -1 : kids[0];
        if (name == "d") return (q >= 0 && q <= 2) ? q : kJunk;
        if (name == "c") return (q >= 0 && q <= 2) ? 3 + q : kJunk;
        if (name == "cp") return (q >= 0 && q <= 2) ? 6 + q : kJunk;
        if (name == "b") return (q >= 3 && q <= 8) ? q : kJunk;
        // root symbol a: two c-branches, one c'-branch, all leaves distinct
        int c_count = 0, cp_count = 0;
        bool leaves[3] = {false, false, false};
        for (int child : kids) {
            if (child >= 3 && child <= 5) ++c_count;
            else if (child >= 6 && child <= 8) ++cp_count;
            else return kRej;
            leaves[leaf_of(child)] = true;
        }
        bool ok = c_count == 2 && cp_count == 1 && leaves[0] && leaves[1] && leaves[2];
        return ok ? kAcc : kRej;
    });
}

Tree make_three_branch_member(int pad, int cp_branch) {
    RankedAlphabet alphabet = make_three_branch_language().alphabet();
    auto sym = [&](const std::string& n) { return *alphabet.find(n); };
    auto branch = [&](bool prime, int leaf) {
        Tree t = make_node(sym("h" + std::to_string(leaf + 1)));
        for (int i = 0; i < pad; ++i) t = make_node(sym("d"), {t});
        t = make_node(sym(prime ? "cp" : "c"), {t});
        for (int i = 0; i < pad; ++i) t = make_node(sym("b"), {t});
        return t;
    };
    std::vector<Tree> kids;
    for (int i = 0; i < 3; ++i) kids.push_back(branch(i == cp_branch, i));
    return make_node(sym("a"), std::move(kids));
}

namespace {

WordDfa word_dfa(std::vector<std::string> letters, int n, int initial, std::vector<int> accepting,
                 std::vector<std::vector<int>> delta) {
    WordDfa d;
    d.letters = std::move(letters);
    d.n_states = n;
    d.initial = initial;
    d.accepting.assign(n, false);
    for (int q : accepting) d.accepting[q] = true;
    d.delta = std::move(delta);
    return d;
}

}  // namespace

std::vector<NamedWordLanguage> word_language_suite() {
    std::vector<NamedWordLanguage> suite;
    // (ab)* : LT.  states: 0 expect-a (accept), 1 expect-b, 2 dead
    suite.push_back({"(ab)*",
                     word_dfa({"a", "b"}, 3, 0, {0},
                              {/*a*/ {1, 2, 2}, /*b*/ {2, 0, 2}}),
                     true});
    // (aa)* over {a} : not LT (parity)
    suite.push_back({"(aa)*", word_dfa({"a"}, 2, 0, {0}, {{1, 0}}), false});
    // a* over {a,b} : LT
    suite.push_back({"a*", word_dfa({"a", "b"}, 2, 0, {0}, {{0, 1}, {1, 1}}), true});
    // b*a* : LT.  0: in b-part (accept), 1: in a-part (accept), 2: dead
    suite.push_back({"b*a*",
                     word_dfa({"a", "b"}, 3, 0, {0, 1},
                              {/*a*/ {1, 1, 2}, /*b*/ {0, 2, 2}}),
                     true});
    // contains ab : LT.  0: no pending a, 1: pending a, 2: seen ab
    suite.push_back({"contains-ab",
                     word_dfa({"a", "b"}, 3, 0, {2},
                              {/*a*/ {1, 1, 2}, /*b*/ {0, 2, 2}}),
                     true});
    // even number of a over {a,b} : not LT (group)
    suite.push_back({"even-a",
                     word_dfa({"a", "b"}, 2, 0, {0}, {/*a*/ {1, 0}, /*b*/ {0, 1}}),
                     false});
    // ends with b : LT
    suite.push_back({"ends-b",
                     word_dfa({"a", "b"}, 2, 0, {1}, {/*a*/ {0, 0}, /*b*/ {1, 1}}),
                     true});
    // contains aa : LT
    suite.push_back({"contains-aa",
                     word_dfa({"a", "b"}, 3, 0, {2},
                              {/*a*/ {1, 2, 2}, /*b*/ {0, 0, 2}}),
                     true});
    // even length over {a,b} : not LT (group)
    suite.push_back({"even-length",
                     word_dfa({"a", "b"}, 2, 0, {0}, {/*a*/ {1, 0}, /*b*/ {1, 0}}),
                     false});
    // starts with a : LT
    suite.push_back({"starts-a",
                     word_dfa({"a", "b"}, 3, 0, {1},
                              {/*a*/ {1, 1, 2}, /*b*/ {2, 1, 2}}),
                     true});
    return suite;
}

}  // namespace ltt
