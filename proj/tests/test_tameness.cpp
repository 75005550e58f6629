#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ltt/oracles.hpp"
#include "ltt/sample_languages.hpp"
#include "ltt/tameness.hpp"

using namespace ltt;

namespace {
RankedAlphabet abc() { return RankedAlphabet({{"a", 2}, {"b", 0}, {"c", 0}}); }

Dfta encoded(const std::string& name) {
    for (const auto& l : word_language_suite())
        if (l.name == name) return encode_word_language(l.dfa);
    throw std::runtime_error("no suite language " + name);
}
}  // namespace

TEST_CASE("universal language is closed under everything") {
    Dfta univ = make_universal(abc());
    for (auto op : {GuardedOp::HSwap, GuardedOp::HTransfer, GuardedOp::VSwap, GuardedOp::VStutter})
        for (int k = 0; k <= 2; ++k) CHECK(closed_under_guarded(op, univ, k).status == Status::Holds);
    CHECK(is_k_tame(univ, 0).status == Status::Holds);
    CHECK(is_k_tame(univ, 3).status == Status::Holds);
}

TEST_CASE("even-b violates horizontal transfer, witness replays") {
    Dfta evenb = make_even_b();
    for (int k = 0; k <= 1; ++k) {
        auto v = closed_under_guarded(GuardedOp::HTransfer, evenb, k);
        REQUIRE(v.status == Status::Violated);
        REQUIRE(v.witness.has_value());
        CHECK(v.witness->op == GuardedOp::HTransfer);
        CHECK(replay_flips(evenb, *v.witness));
    }
    CHECK(is_k_tame(evenb, 0).status == Status::Violated);
    CHECK(is_k_tame(evenb, 1).status == Status::Violated);
}

TEST_CASE("word encoding of (aa)* violates vertical stutter at every small k") {
    Dfta enc = encoded("(aa)*");
    for (int k = 0; k <= 3; ++k) {
        auto v = closed_under_guarded(GuardedOp::VStutter, enc, k);
        REQUIRE(v.status == Status::Violated);
        REQUIRE(v.witness.has_value());
        CHECK(replay_flips(enc, *v.witness));
    }
}

TEST_CASE("tameness bound formula") {
    CHECK(tameness_bound_k0(make_universal(abc())) == 2);
    // minimized 3-state automaton -> 28
    std::mt19937_64 seeds(1);
    int found = 0;
    while (found < 5) {
        Dfta a = minimize(random_dfta(abc(), 3, seeds()));
        if (a.n_states() == 3) {
            CHECK(tameness_bound_k0(a) == 28);
            ++found;
        }
    }
    CHECK(tameness_bound_k0(make_even_b()) == 9);
}

TEST_CASE("is_tame short-circuits on the universal language") {
    auto r = is_tame(make_universal(abc()));
    CHECK(r.verdict.status == Status::Holds);
    REQUIRE(r.certified_k.has_value());
    CHECK(*r.certified_k == 0);
}

TEST_CASE("is_tame: (aa)* encoding is violated at k0") {
    Dfta enc = encoded("(aa)*");
    auto r = is_tame(enc);
    CHECK(r.k0 == tameness_bound_k0(enc));
    REQUIRE(r.verdict.status == Status::Violated);
    REQUIRE(r.verdict.witness.has_value());
    CHECK(r.verdict.witness->k == r.k0);
    CHECK(replay_flips(enc, *r.verdict.witness));
}

TEST_CASE("is_tame: (ab)* encoding holds at a small k") {
    auto r = is_tame(encoded("(ab)*"));
    CHECK(r.verdict.status == Status::Holds);
    REQUIRE(r.certified_k.has_value());
    CHECK(*r.certified_k <= 3);
}

TEST_CASE("word bridge: tameness equals the semigroup equations") {
    for (const auto& l : word_language_suite()) {
        bool eq = lt_equations_hold(syntactic_semigroup(l.dfa));
        auto r = is_tame(encode_word_language(l.dfa));
        INFO(l.name);
        REQUIRE(r.verdict.status != Status::Unknown);
        CHECK((r.verdict.status == Status::Holds) == eq);
    }
}

TEST_CASE("closure checks agree with the brute-force oracle on a pool") {
    std::mt19937_64 seeds(2025);
    int checked = 0;
    while (checked < 30) {
        Dfta a = minimize(random_dfta(abc(), 1 + static_cast<int>(seeds() % 3), seeds()));
        for (int k = 0; k <= 1; ++k) {
            for (auto op :
                 {GuardedOp::HSwap, GuardedOp::HTransfer, GuardedOp::VSwap, GuardedOp::VStutter}) {
                auto v = closed_under_guarded(op, a, k);
                if (v.status == Status::Violated) {
                    REQUIRE(v.witness.has_value());
                    CHECK(replay_flips(a, *v.witness));
                } else {
                    REQUIRE(v.status == Status::Holds);
                    auto brute = brute_closure(a, op, k, 7);
                    CHECK(brute.status == Status::Holds);
                }
            }
        }
        ++checked;
    }
}

TEST_CASE("monotonicity: k-tame implies (k+1)-tame on the pool") {
    std::mt19937_64 seeds(555);
    int checked = 0;
    while (checked < 25) {
        Dfta a = minimize(random_dfta(abc(), 1 + static_cast<int>(seeds() % 3), seeds()));
        auto v0 = is_k_tame(a, 0);
        auto v1 = is_k_tame(a, 1);
        auto v2 = is_k_tame(a, 2);
        if (v0.status == Status::Holds) CHECK(v1.status == Status::Holds);
        if (v1.status == Status::Holds) CHECK(v2.status == Status::Holds);
        ++checked;
    }
}

TEST_CASE("the three-branch language is 1-tame but not 0-tame in general") {
    Dfta fixture = make_three_branch_language();
    auto v1 = is_k_tame(fixture, 1);
    CHECK(v1.status == Status::Holds);
    // members stay members under valid instances
    CHECK(fixture.accepts(make_three_branch_member(2)));
    CHECK_FALSE(fixture.accepts(make_three_branch_member(0, /*cp_branch=*/-1)));
}
