#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ltt/oracles.hpp"
#include "ltt/sample_languages.hpp"
#include "ltt/testability.hpp"

using namespace ltt;

namespace {
RankedAlphabet ab() { return RankedAlphabet({{"a", 2}, {"b", 0}}); }
RankedAlphabet abc() { return RankedAlphabet({{"a", 2}, {"b", 0}, {"c", 0}}); }

Tree random_tree(const RankedAlphabet& alphabet, int max_nodes, std::mt19937_64& rng) {
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

Dfta encoded(const std::string& name) {
    for (const auto& l : word_language_suite())
        if (l.name == name) return encode_word_language(l.dfa);
    throw std::runtime_error("no suite language " + name);
}
}  // namespace

TEST_CASE("occurrence evaluator matches the definitional data") {
    std::mt19937_64 rng(7);
    for (auto alphabet : {ab(), abc()}) {
        for (int kappa = 0; kappa <= 2; ++kappa) {
            OccurrenceAutomaton occ(alphabet, kappa);
            for (int i = 0; i < 60; ++i) {
                Tree t = random_tree(alphabet, 30, rng);
                int id = occ.eval(t);
                const auto& st = occ.state(id);
                CHECK(shape_key(occ.types().shape(st.root_type)) ==
                      shape_key(truncate(t, kappa)));
                std::set<std::string> got;
                for (int tid : st.occ) got.insert(shape_key(occ.types().shape(tid)));
                CHECK(got == occurrence_keys(t, kappa));
            }
        }
    }
    // kappa=0 example: state = (root label, set of labels)
    OccurrenceAutomaton occ0(ab(), 0);
    Tree t = parse_tree("a(b,b)", ab());
    const auto& st = occ0.state(occ0.eval(t));
    CHECK(st.occ.size() == 2);

    // kappa=1 on a(b,b): root type a(b,b), occ {a(b,b), b}
    OccurrenceAutomaton occ1(ab(), 1);
    const auto& st1 = occ1.state(occ1.eval(t));
    CHECK(shape_key(occ1.types().shape(st1.root_type)) == shape_key(t));
    CHECK(st1.occ.size() == 2);
}

TEST_CASE("is_kappa_testable on simple languages") {
    CHECK(is_kappa_testable(make_universal(abc()), 0).status == Status::Holds);

    // "root label is a" over {a:2,b:0}: determined by the 0-type of the root
    RankedAlphabet al = ab();
    std::vector<std::vector<int>> delta(2);
    delta[0] = {1, 1, 1, 1};  // a(x,y) -> 1
    delta[1] = {0};           // b -> 0
    Dfta root_a(al, 2, {false, true}, delta);
    CHECK(is_kappa_testable(root_a, 0).status == Status::Holds);

    // even-b is not 0-testable; the canonical small pair flips membership
    Dfta evenb = make_even_b();
    auto v = is_kappa_testable(evenb, 0);
    REQUIRE(v.status == Status::Violated);
    REQUIRE(v.witness_pair.has_value());
    auto [member, nonmember] = *v.witness_pair;
    CHECK(evenb.accepts(member));
    CHECK_FALSE(evenb.accepts(nonmember));
    CHECK(equiv_k(member, nonmember, 0));
    CHECK(is_kappa_testable(evenb, 1).status == Status::Violated);
}

TEST_CASE("is_kappa_testable agrees with brute_testable on a pool") {
    std::mt19937_64 seeds(99);
    int done = 0;
    while (done < 25) {
        Dfta a = minimize(random_dfta(done % 2 ? ab() : abc(), 1 + static_cast<int>(seeds() % 3),
                                      seeds()));
        for (int kappa = 0; kappa <= 1; ++kappa) {
            auto module_v = is_kappa_testable(a, kappa);
            auto brute_v = brute_testable(a, kappa, 8);
            if (brute_v.status == Status::Violated) CHECK(module_v.status == Status::Violated);
            if (module_v.status == Status::Violated) {
                REQUIRE(module_v.witness_pair.has_value());
                auto [t1, t2] = *module_v.witness_pair;
                CHECK(equiv_k(t1, t2, kappa));
                CHECK(a.accepts(t1) != a.accepts(t2));
            }
        }
        ++done;
    }
}

TEST_CASE("monotonicity: testable at kappa implies testable at kappa+1") {
    std::mt19937_64 seeds(123);
    int done = 0;
    while (done < 20) {
        Dfta a = minimize(random_dfta(abc(), 1 + static_cast<int>(seeds() % 3), seeds()));
        auto v0 = is_kappa_testable(a, 0);
        auto v1 = is_kappa_testable(a, 1);
        if (v0.status == Status::Holds) CHECK(v1.status == Status::Holds);
        ++done;
    }
}

TEST_CASE("kappa_bound") {
    Dfta u_ab = make_universal(ab());
    CHECK(kappa_bound(u_ab, 0).to_string() == "3");   // 2+0+1
    CHECK(kappa_bound(u_ab, 1).to_string() == "7");   // 5+1+1
    CHECK(kappa_bound(u_ab, 2).to_string() == "29");  // 26+2+1
    // monotone in k
    CHECK(kappa_bound(u_ab, 1) < kappa_bound(u_ab, 2));
    CHECK(kappa_bound(u_ab, 2) < kappa_bound(u_ab, 3));
}

TEST_CASE("decide_lt on canonical cases") {
    auto univ = decide_lt(make_universal(abc()));
    CHECK(univ.status == LtStatus::LT);
    REQUIRE(univ.kappa.has_value());
    CHECK(*univ.kappa == 0);

    auto evenb = decide_lt(make_even_b());
    CHECK(evenb.status == LtStatus::NotLT);
    CHECK(evenb.reason == LtReason::NotTame);

    auto aa = decide_lt(encoded("(aa)*"));
    CHECK(aa.status == LtStatus::NotLT);
    CHECK(aa.reason == LtReason::NotTame);

    auto abl = decide_lt(encoded("(ab)*"));
    CHECK(abl.status == LtStatus::LT);
}

TEST_CASE("decide_lt agrees with the semigroup equations on the word suite") {
    for (const auto& l : word_language_suite()) {
        INFO(l.name);
        auto v = decide_lt(encode_word_language(l.dfa));
        REQUIRE(v.status != LtStatus::Unknown);
        CHECK((v.status == LtStatus::LT) == l.locally_testable);
    }
}

TEST_CASE("decide_lt takes the exact bound path on a one-letter alphabet") {
    // universal one-letter word language: tame at 0, beta_0 = 2, so the
    // computed kappa* = 3 is within reach of the scan ceiling
    WordDfa univ;
    univ.letters = {"a"};
    univ.n_states = 1;
    univ.initial = 0;
    univ.accepting = {true};
    univ.delta = {{0}};
    Dfta enc = encode_word_language(univ);
    DecideLtLimits limits;
    limits.max_kappa = 4;
    LtVerdict v = decide_lt(enc, limits);
    CHECK(v.status == LtStatus::LT);
    REQUIRE(v.kappa.has_value());
    CHECK(*v.kappa == 3);  // beta_0 + 0 + 1
    CHECK(v.via.find("kappa*") != std::string::npos);
}

TEST_CASE("the three-branch language fails testability at small kappa") {
    Dfta fixture = make_three_branch_language();
    for (int kappa = 1; kappa <= 3; ++kappa) {
        auto v = is_kappa_testable(fixture, kappa);
        REQUIRE(v.status == Status::Violated);
        REQUIRE(v.witness_pair.has_value());
        auto [member, nonmember] = *v.witness_pair;
        CHECK(fixture.accepts(member));
        CHECK_FALSE(fixture.accepts(nonmember));
        CHECK(equiv_k(member, nonmember, kappa));
    }
}
