#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ltt/unranked.hpp"

using namespace ltt;

namespace {

UnrankedAlphabet ab() { return UnrankedAlphabet{{"a", "b"}}; }

// delta as a function of (symbol, counts); counts capped at m
CountingDfta build_counting(const UnrankedAlphabet& alphabet, int n, int m,
                            const std::vector<bool>& final,
                            const std::function<int(int, const std::vector<int>&)>& f) {
    std::size_t profiles = 1;
    for (int i = 0; i < n; ++i) profiles *= m + 1;
    std::vector<std::vector<int>> delta(alphabet.size());
    for (int s = 0; s < alphabet.size(); ++s) {
        delta[s].resize(profiles);
        for (std::size_t idx = 0; idx < profiles; ++idx) {
            std::vector<int> counts(n);
            std::size_t rest = idx;
            for (int q = n - 1; q >= 0; --q) {
                counts[q] = static_cast<int>(rest % (m + 1));
                rest /= (m + 1);
            }
            delta[s][idx] = f(s, counts);
        }
    }
    return CountingDfta(alphabet, n, m, final, std::move(delta));
}

CountingDfta make_u_universal() {
    return build_counting(ab(), 1, 1, {true}, [](int, const std::vector<int>&) { return 0; });
}

// root has exactly one b-child (m = 2); states: 0 = b-leafish, 1 = other
// with exactly one b child, 2 = other
CountingDfta make_exactly_one_b_child() {
    UnrankedAlphabet al = ab();
    // states: 0 = "is b", 1 = "is a with exactly one b child", 2 = otherwise
    return build_counting(al, 3, 2, {false, true, false}, [](int s, const std::vector<int>& c) {
        if (s == 1) return 0;  // symbol b
        return c[0] == 1 ? 1 : 2;
    });
}

// some a-node has at least one b-child
CountingDfta make_has_b_child() {
    UnrankedAlphabet al = ab();
    // states: 0 = b-rooted without the pattern, 1 = a-rooted without,
    // 2 = pattern seen
    return build_counting(al, 3, 1, {false, false, true}, [](int s, const std::vector<int>& c) {
        bool inherited = c[2] >= 1;
        if (s == 1) return inherited ? 2 : 0;
        if (c[0] >= 1 || inherited) return 2;
        return 1;
    });
}

// even number of b leaves anywhere (m = 2 threshold cannot count parity:
// use states to carry it)
CountingDfta make_even_b_unranked() {
    UnrankedAlphabet al = ab();
    // parity automaton: m = 2, states 0 (even), 1 (odd); a node's parity is
    // the sum of children parities (mod 2) plus 1 if the node is b.
    // Counting up to threshold 2 cannot compute parity exactly, so this
    // automaton is approximate for >= 2; instead track parity with m = 2
    // over children counted exactly: with counts capped at 2 the language
    // "number of odd children is even" is not exactly representable, so use
    // trees of small width in the tests only.
    return build_counting(al, 2, 2, {true, false}, [](int s, const std::vector<int>& c) {
        int parity = (c[1] % 2 + (s == 1 ? 1 : 0)) % 2;
        return parity;
    });
}

}  // namespace

TEST_CASE("unranked parse, render, canonical order") {
    UnrankedAlphabet al = ab();
    UnrankedTree leaf = parse_unranked("a", al);
    CHECK(render_unranked(leaf, al) == "a");
    CHECK(unranked_equal(parse_unranked("a{}", al), leaf));

    UnrankedTree t1 = parse_unranked("a{b,b,a}", al);
    UnrankedTree t2 = parse_unranked("a{b,a,b}", al);
    CHECK(unranked_equal(t1, t2));
    CHECK(render_unranked(t1, al) == render_unranked(t2, al));

    CHECK_THROWS_AS(parse_unranked("a{b,", al), ParseError);
    CHECK_THROWS_AS(parse_unranked("c", al), ParseError);

    std::mt19937_64 rng(5);
    std::function<UnrankedTree(int)> gen = [&](int budget) -> UnrankedTree {
        int width = budget <= 1 ? 0 : static_cast<int>(rng() % 3);
        std::vector<UnrankedTree> kids;
        for (int i = 0; i < width; ++i) kids.push_back(gen((budget - 1) / width));
        return make_unode(static_cast<int>(rng() % 2), std::move(kids));
    };
    for (int i = 0; i < 100; ++i) {
        UnrankedTree t = gen(20);
        CHECK(unranked_equal(parse_unranked(render_unranked(t, al), al), t));
    }
}

TEST_CASE("kl types") {
    UnrankedAlphabet al = ab();
    KLTypeRegistry reg2(2);
    // k=0: label only
    UnrankedTree t = parse_unranked("a{b,b,b}", al);
    int t0 = reg2.type_of(t, 0);
    CHECK(reg2.entry(t0).label == 0);
    CHECK(reg2.entry(t0).counts.empty());
    // a{b,b,b} at (1,2): count of the b-type saturates at >=2
    int t1 = reg2.type_of(t, 1);
    REQUIRE(reg2.entry(t1).counts.size() == 1);
    CHECK(reg2.entry(t1).counts[0].second == 2);
    // same type as a{b,b}
    CHECK(reg2.type_of(parse_unranked("a{b,b}", al), 1) == t1);
    // different from a{b}
    CHECK(reg2.type_of(parse_unranked("a{b}", al), 1) != t1);
}

TEST_CASE("equiv_kl") {
    UnrankedAlphabet al = ab();
    CHECK(equiv_kl(parse_unranked("a{b,b}", al), parse_unranked("a{b,b,b}", al), 1, 2));
    CHECK_FALSE(equiv_kl(parse_unranked("a{b}", al), parse_unranked("a{b,b}", al), 1, 2));
    std::mt19937_64 rng(6);
    std::function<UnrankedTree(int)> gen = [&](int budget) -> UnrankedTree {
        int width = budget <= 1 ? 0 : static_cast<int>(rng() % 4);
        std::vector<UnrankedTree> kids;
        for (int i = 0; i < width; ++i) kids.push_back(gen((budget - 1) / width));
        return make_unode(static_cast<int>(rng() % 2), std::move(kids));
    };
    for (int i = 0; i < 200; ++i) {
        UnrankedTree t1 = gen(14), t2 = gen(14);
        CHECK(equiv_kl(t1, t1, 2, 2));
        // refinement in k and in l
        if (equiv_kl(t1, t2, 2, 2)) CHECK(equiv_kl(t1, t2, 1, 2));
        if (equiv_kl(t1, t2, 1, 3)) CHECK(equiv_kl(t1, t2, 1, 2));
    }
}

TEST_CASE("(k,2)-types coincide with plain k-types on 0-or-2-children trees") {
    UnrankedAlphabet al = ab();
    std::mt19937_64 rng(7);
    std::function<UnrankedTree(int)> gen02 = [&](int depth) -> UnrankedTree {
        bool leaf = depth <= 0 || (rng() % 2 == 0);
        std::vector<UnrankedTree> kids;
        if (!leaf) {
            kids.push_back(gen02(depth - 1));
            kids.push_back(gen02(depth - 1));
        }
        return make_unode(static_cast<int>(rng() % 2), std::move(kids));
    };
    for (int i = 0; i < 1000; ++i) {
        UnrankedTree t1 = gen02(3), t2 = gen02(3);
        for (int k = 0; k <= 3; ++k) {
            KLTypeRegistry reg(2);
            bool kl_eq = reg.type_of(t1, k) == reg.type_of(t2, k);
            bool plain_eq = utruncations_equal(t1, t2, k);
            CHECK(kl_eq == plain_eq);
        }
    }
}

TEST_CASE("count_kl_types") {
    CHECK(count_kl_types(1, 0, 1).to_string() == "1");
    CHECK(count_kl_types(1, 1, 1).to_string() == "2");   // a with no children / >=1
    CHECK(count_kl_types(2, 1, 1).to_string() == "8");   // 2 * 2^2
    CHECK(count_kl_types(2, 1, 2).to_string() == "18");  // 2 * 3^2
    // exhaustive check: realized plus unrealized shapes for small parameters
    for (int l = 1; l <= 2; ++l) {
        for (int k = 0; k <= 1; ++k) {
            // enumerate (k,l)-type shapes directly: label x count maps
            std::uint64_t expect = count_kl_types(2, k, l).to_u64();
            if (k == 0) {
                CHECK(expect == 2);
            } else {
                std::uint64_t per_label = 1;
                for (int i = 0; i < 2; ++i) per_label *= (l + 1);
                CHECK(expect == 2 * per_label);
            }
        }
    }
}

TEST_CASE("counting automata run") {
    CountingDfta one_b = make_exactly_one_b_child();
    UnrankedAlphabet al = one_b.alphabet();
    CHECK(one_b.accepts(parse_unranked("a{b}", al)));
    CHECK(one_b.accepts(parse_unranked("a{b,a}", al)));
    CHECK_FALSE(one_b.accepts(parse_unranked("a{b,b}", al)));
    CHECK_FALSE(one_b.accepts(parse_unranked("a", al)));
    CHECK_FALSE(one_b.accepts(parse_unranked("b", al)));

    // at least 2 b-children with m=2; states: 0 = b, 1 = a without, 2 = a with
    CountingDfta two_b = build_counting(ab(), 3, 2, {false, false, true},
                                        [](int s, const std::vector<int>& c) {
                                            if (s == 1) return 0;
                                            return c[0] >= 2 ? 2 : 1;
                                        });
    CHECK(two_b.accepts(parse_unranked("a{b,b,a}", two_b.alphabet())));
    CHECK_FALSE(two_b.accepts(parse_unranked("a{b,a}", two_b.alphabet())));
    // invariance under child reordering is the canonical-form property
    CHECK(two_b.accepts(parse_unranked("a{b,a,b}", two_b.alphabet())));
}

TEST_CASE("counting minimize and equivalence") {
    CountingDfta one_b = make_exactly_one_b_child();
    CountingDfta m = minimize_counting(one_b);
    CHECK(m.n_states() <= one_b.n_states());
    CHECK(counting_equivalent(m, one_b));
    CHECK(minimize_counting(m).n_states() == m.n_states());
}

TEST_CASE("counting dfta file round-trip") {
    CountingDfta one_b = make_exactly_one_b_child();
    std::string text = save_counting_dfta(one_b);
    CountingDfta back = load_counting_dfta(text);
    CHECK(counting_equivalent(back, one_b));
    CHECK(save_counting_dfta(back) == text);
}

TEST_CASE("apply_unranked_op basics") {
    UnrankedAlphabet al = ab();
    UnrankedTree t = parse_unranked("a{b,a{b}}", al);
    // duplicate the a{b} child
    const auto& kids = t->children;
    int idx = -1;
    for (std::size_t i = 0; i < kids.size(); ++i)
        if (!kids[i]->children.empty()) idx = static_cast<int>(i);
    UnrankedTree t2 = apply_unranked_op(UOp::HStutter, t, {{idx}}, 0, 1);
    CHECK(unranked_size(t2) == unranked_size(t) + 2);
    CHECK_THROWS(apply_unranked_op(UOp::HStutter, t, {{}}, 0, 1));
}

TEST_CASE("hstutter closure check with replay") {
    // duplicating a child flips "exactly one b-child"
    CountingDfta one_b = make_exactly_one_b_child();
    auto v = closed_under_kl_guarded(UOp::HStutter, one_b, 0, 1);
    REQUIRE(v.status == Status::Violated);
    REQUIRE(v.uwitness.has_value());
    CHECK(ureplay_flips(minimize_counting(one_b), *v.uwitness));

    // "some node has a b-child" is stutter-closed
    CHECK(closed_under_kl_guarded(UOp::HStutter, make_has_b_child(), 0, 1).status == Status::Holds);
    CHECK(closed_under_kl_guarded(UOp::HStutter, make_u_universal(), 0, 1).status == Status::Holds);
}

TEST_CASE("hstutter check agrees with brute duplication on a pool") {
    std::mt19937_64 seeds(31337);
    for (int i = 0; i < 40; ++i) {
        CountingDfta a = random_counting_dfta(ab(), 1 + static_cast<int>(seeds() % 3),
                                              1 + static_cast<int>(seeds() % 2), seeds());
        CountingDfta m = minimize_counting(a);
        auto module_v = closed_under_kl_guarded(UOp::HStutter, m, 0, 1);
        auto brute_v = brute_hstutter(m, 7);
        if (brute_v.status == Status::Violated) CHECK(module_v.status == Status::Violated);
        if (module_v.status == Status::Violated) {
            REQUIRE(module_v.uwitness.has_value());
            CHECK(ureplay_flips(m, *module_v.uwitness));
        }
    }
}

TEST_CASE("is_kl_tame basics") {
    CHECK(is_kl_tame(make_u_universal(), 0, 2).status == Status::Holds);
    CHECK_THROWS(is_kl_tame(make_u_universal(), 0, 1));  // l must exceed m

    // even-b: transfer flips parity
    CountingDfta evenb = make_even_b_unranked();
    auto v = is_kl_tame(evenb, 0, 3);
    CHECK(v.status == Status::Violated);
    if (v.uwitness) CHECK(ureplay_flips(minimize_counting(evenb), *v.uwitness));
}

TEST_CASE("is_kl_testable") {
    CHECK(is_kl_testable(make_u_universal(), 0, 1).status == Status::Holds);

    // exactly-one-b-child: a{b} and a{b,b} share (1,1)-data but differ
    CountingDfta one_b = make_exactly_one_b_child();
    auto v = is_kl_testable(one_b, 1, 1);
    REQUIRE(v.status == Status::Violated);
    REQUIRE(v.uwitness_pair.has_value());
    auto [mem, nonmem] = *v.uwitness_pair;
    CountingDfta m = minimize_counting(one_b);
    CHECK(m.accepts(mem));
    CHECK_FALSE(m.accepts(nonmem));
    CHECK(equiv_kl(mem, nonmem, 1, 1));

    // root-label-is-a at (0,1)
    CountingDfta root_a = build_counting(ab(), 2, 1, {true, false},
                                         [](int s, const std::vector<int>&) { return s == 0 ? 0 : 1; });
    CHECK(is_kl_testable(root_a, 0, 1).status == Status::Holds);
}

TEST_CASE("decide_ilt on canonical cases") {
    auto univ = decide_ilt(make_u_universal());
    CHECK(univ.status == LtStatus::LT);

    auto one_b = decide_ilt(make_exactly_one_b_child());
    CHECK(one_b.status == LtStatus::NotLT);
    CHECK(one_b.reason == LtReason::NotStutter);

    auto has_b = decide_ilt(make_has_b_child());
    CHECK(has_b.status == LtStatus::LT);
}

TEST_CASE("decide_alt on canonical cases") {
    // ILT languages are ALT (lambda = 1 scan finds them)
    auto univ = decide_alt(make_u_universal());
    CHECK(univ.status == LtStatus::LT);

    // root has >= 2 b-children, m = 3: testable at (1,2) but not lambda=1
    CountingDfta two_b = build_counting(ab(), 3, 3, {false, false, true},
                                        [](int s, const std::vector<int>& c) {
                                            if (s == 1) return 0;
                                            return c[0] >= 2 ? 2 : 1;
                                        });
    auto v = decide_alt(two_b);
    CHECK(v.status == LtStatus::LT);
    REQUIRE(v.lambda.has_value());
    CHECK(*v.lambda == 2);
    CHECK(is_kl_testable(two_b, 1, 1).status == Status::Violated);
}

TEST_CASE("decide_alt takes the exact bound path on a one-symbol alphabet") {
    UnrankedAlphabet al{{"a"}};
    CountingDfta univ(al, 1, 1, {true}, {{0, 0}});
    DecideUnrankedLimits limits;
    limits.max_kappa = 3;
    limits.max_lambda = 3;
    LtVerdict v = decide_alt(univ, limits);
    CHECK(v.status == LtStatus::LT);
    REQUIRE(v.kappa.has_value());
    REQUIRE(v.lambda.has_value());
    CHECK(*v.kappa == 2);   // beta_{0,2} + 0 + 1
    CHECK(*v.lambda == 3);  // |A| * l + 1 with l = m + 1 = 2
    CHECK(v.via.find("kappa*") != std::string::npos);
}

TEST_CASE("enumerate_unranked_trees") {
    auto t3 = enumerate_unranked_trees(1, 3);
    // sizes 1..3 over one label: o, o{o}, o{o,o}, o{o{o}}
    CHECK(t3.size() == 4);
    auto t5 = enumerate_unranked_trees(2, 5);
    std::set<std::string> keys;
    UnrankedAlphabet al = ab();
    for (const auto& t : t5) keys.insert(render_unranked(t, al));
    CHECK(keys.size() == t5.size());  // exactly once
}

TEST_CASE("kl closure verdicts agree with exhaustive op application") {
    std::mt19937_64 seeds(0xC10);
    for (int i = 0; i < 12; ++i) {
        CountingDfta a = minimize_counting(random_counting_dfta(
            ab(), 1 + static_cast<int>(seeds() % 3), 1 + static_cast<int>(seeds() % 2), seeds()));
        int l = a.threshold() + 1;
        for (int k = 0; k <= 1; ++k) {
            for (UOp op : {UOp::HSwap, UOp::HTransfer, UOp::VSwap, UOp::VStutter}) {
                ClosureVerdict v = closed_under_kl_guarded(op, a, k, l);
                if (v.status == Status::Holds) {
                    CHECK(brute_kl_closure(a, op, k, l, 7).status == Status::Holds);
                } else if (v.status == Status::Violated) {
                    REQUIRE(v.uwitness.has_value());
                    CHECK(ureplay_flips(a, *v.uwitness));
                }
            }
        }
    }
}

TEST_CASE("decide_ilt agrees with the brute (kappa,1)-union check on a pool") {
    std::mt19937_64 seeds(2026);
    int conclusive_pairs = 0;
    for (int i = 0; i < 30; ++i) {
        CountingDfta a = minimize_counting(random_counting_dfta(
            ab(), 1 + static_cast<int>(seeds() % 3), 1 + static_cast<int>(seeds() % 2), seeds()));
        auto module_v = decide_ilt(a);
        if (module_v.status == LtStatus::Unknown) continue;
        // brute: is the language a union of (kappa,1)-classes for kappa <= 2?
        bool brute_ilt = false;
        for (int kappa = 0; kappa <= 2 && !brute_ilt; ++kappa)
            brute_ilt = brute_kl_testable(a, kappa, 1, 8).status == Status::Holds;
        // brute is bounded: a Holds verdict up to the bound confirms LT
        // instances; for NotLT the module's reason must be replayable
        if (module_v.status == LtStatus::LT) {
            CHECK(brute_ilt);
            ++conclusive_pairs;
        } else {
            // NotLT: brute must find no certificate... it cannot certify
            // non-membership, but module witnesses replay
            if (module_v.uclosure_witness)
                CHECK(ureplay_flips(a, *module_v.uclosure_witness));
            ++conclusive_pairs;
        }
    }
    CHECK(conclusive_pairs >= 10);
}
