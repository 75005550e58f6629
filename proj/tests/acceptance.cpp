// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Bounds and tolerances are pinned here, not configurable.

#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ltt/dfta.hpp"
#include "ltt/guarded.hpp"
#include "ltt/ktype.hpp"
#include "ltt/oracles.hpp"
#include "ltt/sample_languages.hpp"
#include "ltt/tameness.hpp"
#include "ltt/testability.hpp"
#include "ltt/unranked.hpp"

#include "acceptance_util.hpp"

using namespace ltt;
using ltt_tests::all_paths;
using ltt_tests::enumerate_type_shapes;
using ltt_tests::random_tree;

namespace {

int g_failures = 0;

struct Criterion {
    int number;
    std::string name;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    Criterion(int n, std::string nm) : number(n), name(std::move(nm)) {}

    void require(bool cond, const std::string& what) {
        if (!cond && ok) {
            ok = false;
            detail = what;
        }
    }
    void note(const std::string& text) {
        if (!detail.empty()) detail += "; ";
        detail += text;
    }
    ~Criterion() {
        auto secs = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count() /
                    1000.0;
        std::printf("CRITERION %d (%s): %s [%.1fs]%s%s\n", number, name.c_str(),
                    ok ? "PASS" : "FAIL", secs, detail.empty() ? "" : " -- ", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++g_failures;
    }
};

RankedAlphabet alpha_ab() { return RankedAlphabet({{"a", 2}, {"b", 0}}); }
RankedAlphabet alpha_abc() { return RankedAlphabet({{"a", 2}, {"b", 0}, {"c", 0}}); }

std::vector<Dfta> make_pool(int count, std::uint64_t seed) {
    std::vector<Dfta> pool;
    std::mt19937_64 rng(seed);
    while (static_cast<int>(pool.size()) < count) {
        RankedAlphabet alphabet = pool.size() % 2 ? alpha_ab() : alpha_abc();
        int n = 1 + static_cast<int>(rng() % 3);
        pool.push_back(minimize(random_dfta(alphabet, n, rng())));
    }
    return pool;
}

void criterion1() {
    Criterion c(1, "formula reproduction");
    std::mt19937_64 rng(101);
    for (int i = 0; i < 20; ++i) {
        RankedAlphabet alphabet = i % 2 ? alpha_ab() : alpha_abc();
        Dfta a = minimize(random_dfta(alphabet, 1 + static_cast<int>(rng() % 4), rng()));
        std::int64_t n = a.n_states();
        c.require(tameness_bound_k0(a) == n * n * n + 1, "k0 formula mismatch");
        for (int k = 0; k <= 2; ++k) {
            BigUint expect = count_ktypes(alphabet, k) + BigUint(static_cast<std::uint64_t>(k) + 1);
            c.require(kappa_bound(a, k) == expect, "kappa bound formula mismatch");
        }
    }
    // beta_k against exhaustive shape enumeration
    for (auto alphabet : {alpha_ab(), alpha_abc(), RankedAlphabet({{"f", 1}, {"g", 1}, {"x", 0}})}) {
        for (int k = 0; k <= 2; ++k) {
            std::uint64_t counted = count_ktypes(alphabet, k).to_u64();
            std::uint64_t enumerated = enumerate_type_shapes(alphabet, k).size();
            c.require(counted == enumerated, "beta_" + std::to_string(k) + " != enumeration (" +
                                                 std::to_string(counted) + " vs " +
                                                 std::to_string(enumerated) + ")");
        }
    }
}

void criterion2() {
    Criterion c(2, "word bridge");
    int conclusive = 0;
    for (const auto& l : word_language_suite()) {
        bool equations = lt_equations_hold(syntactic_semigroup(l.dfa));
        Dfta enc = encode_word_language(l.dfa);
        LtVerdict v = decide_lt(enc);
        if (v.status == LtStatus::Unknown) {
            c.require(false, l.name + ": decide_lt inconclusive");
            continue;
        }
        ++conclusive;
        c.require((v.status == LtStatus::LT) == equations,
                  l.name + ": equations say " + (equations ? "LT" : "not LT") +
                      ", decide_lt says " + to_string(v.status));
    }
    c.require(conclusive >= 8, "fewer than 8 conclusive word languages");
    c.note(std::to_string(conclusive) + " languages, all conclusive");
}

void criterion3() {
    Criterion c(3, "closure-check oracle equivalence");
    auto pool = make_pool(200, 303);
    int violated = 0, holds = 0;
    for (const auto& a : pool) {
        for (int k = 0; k <= 1 && c.ok; ++k) {
            for (GuardedOp op : {GuardedOp::HSwap, GuardedOp::HTransfer, GuardedOp::VSwap,
                                 GuardedOp::VStutter}) {
                ClosureVerdict v = closed_under_guarded(op, a, k);
                if (v.status == Status::Violated) {
                    ++violated;
                    if (!v.witness || !replay_flips(a, *v.witness)) {
                        c.require(false, to_string(op) + " witness does not replay");
                        break;
                    }
                } else if (v.status == Status::Holds) {
                    ++holds;
                    ClosureVerdict brute = brute_closure(a, op, k, 9);
                    if (brute.status == Status::Violated) {
                        c.require(false, to_string(op) + "@" + std::to_string(k) +
                                             " Holds refuted by brute force");
                        break;
                    }
                } else {
                    c.require(false, to_string(op) + " inconclusive on the pool");
                    break;
                }
            }
        }
        if (!c.ok) break;
    }
    c.note(std::to_string(violated) + " violations replayed, " + std::to_string(holds) +
           " holds unrefuted at max_nodes=9");
}

void criterion4() {
    Criterion c(4, "kappa-testability oracle equivalence");
    auto pool = make_pool(200, 404);
    int brute_violations = 0, module_witnesses = 0;
    for (const auto& a : pool) {
        for (int kappa = 0; kappa <= 1 && c.ok; ++kappa) {
            ClosureVerdict module_v = is_kappa_testable(a, kappa);
            ClosureVerdict brute_v = brute_testable(a, kappa, 8);
            if (brute_v.status == Status::Violated) {
                ++brute_violations;
                c.require(module_v.status == Status::Violated,
                          "brute found a violation the module missed (kappa=" +
                              std::to_string(kappa) + ")");
            }
            if (module_v.status == Status::Violated) {
                ++module_witnesses;
                if (!module_v.witness_pair) {
                    c.require(false, "violated without witness pair");
                    break;
                }
                auto [t1, t2] = *module_v.witness_pair;
                c.require(equiv_k(t1, t2, kappa) && a.accepts(t1) && !a.accepts(t2),
                          "module witness pair fails equiv/membership");
            }
        }
        if (!c.ok) break;
    }
    c.note(std::to_string(brute_violations) + " brute violations matched, " +
           std::to_string(module_witnesses) + " module witness pairs verified");
}

void criterion5() {
    Criterion c(5, "tame-but-not-LT fixture");
    Dfta fixture = make_three_branch_language();
    ClosureVerdict tame1 = is_k_tame(fixture, 1);
    c.require(tame1.status == Status::Holds, "fixture not 1-tame: " + tame1.note);
    for (int kappa = 1; kappa <= 3 && c.ok; ++kappa) {
        ClosureVerdict v = is_kappa_testable(fixture, kappa);
        c.require(v.status == Status::Violated,
                  "kappa=" + std::to_string(kappa) + " not violated: " + v.note);
        if (v.status != Status::Violated) break;
        auto [member, nonmember] = *v.witness_pair;
        c.require(fixture.accepts(member) && !fixture.accepts(nonmember) &&
                      equiv_k(member, nonmember, kappa),
                  "fixture witness pair invalid at kappa=" + std::to_string(kappa));
    }
    c.note("1-tame holds, kappa in {1,2,3} violated with member/nonmember pairs");
}

void criterion6() {
    Criterion c(6, "monotonicity");
    auto pool = make_pool(50, 606);
    int tame_confirmed = 0, testable_confirmed = 0;
    for (const auto& a : pool) {
        for (int k = 0; k <= 1; ++k) {
            ClosureVerdict lo = is_k_tame(a, k);
            if (lo.status != Status::Holds) continue;
            ClosureVerdict hi = is_k_tame(a, k + 1);
            c.require(hi.status != Status::Violated,
                      "k-tame at " + std::to_string(k) + " but violated at " + std::to_string(k + 1));
            if (hi.status == Status::Holds) ++tame_confirmed;
        }
        for (int kappa = 0; kappa <= 1; ++kappa) {
            ClosureVerdict lo = is_kappa_testable(a, kappa);
            if (lo.status != Status::Holds) continue;
            ClosureVerdict hi = is_kappa_testable(a, kappa + 1);
            c.require(hi.status != Status::Violated, "testable at " + std::to_string(kappa) +
                                                         " but violated at " +
                                                         std::to_string(kappa + 1));
            if (hi.status == Status::Holds) ++testable_confirmed;
        }
        if (!c.ok) break;
    }
    c.require(tame_confirmed >= 20 && testable_confirmed >= 20,
              "too few conclusive confirmations (" + std::to_string(tame_confirmed) + "/" +
                  std::to_string(testable_confirmed) + ")");
    c.note("zero violations; " + std::to_string(tame_confirmed) + " tameness and " +
           std::to_string(testable_confirmed) + " testability implications confirmed");
}

void criterion7() {
    Criterion c(7, "unranked ILT");
    UnrankedAlphabet al{{"a", "b"}};
    std::mt19937_64 rng(707);
    int ilt_yes = 0, ilt_no = 0, unknown = 0, stutter_checked = 0;
    for (int i = 0; i < 100; ++i) {
        CountingDfta a = minimize_counting(random_counting_dfta(
            al, 1 + static_cast<int>(rng() % 3), 1 + static_cast<int>(rng() % 2), rng()));
        // horizontal stutter: exact check against exhaustive duplication
        ClosureVerdict stutter = closed_under_kl_guarded(UOp::HStutter, a, 0, a.threshold() + 1);
        ClosureVerdict brute_stutter = brute_hstutter(a, 7);
        if (brute_stutter.status == Status::Violated)
            c.require(stutter.status == Status::Violated, "brute stutter flip missed by the check");
        if (stutter.status == Status::Violated) {
            c.require(stutter.uwitness && ureplay_flips(a, *stutter.uwitness),
                      "stutter witness does not replay");
        }
        ++stutter_checked;

        LtVerdict v = decide_ilt(a);
        if (v.status == LtStatus::Unknown) {
            ++unknown;
            continue;
        }
        if (v.status == LtStatus::LT) {
            ++ilt_yes;
            // the pool is small enough that ILT languages are unions of
            // (kappa,1)-classes with small witnesses
            ClosureVerdict brute = brute_kl_testable(a, 2, 1, 8);
            c.require(brute.status == Status::Holds,
                      "decide_ilt says ILT but the bounded union check found a conflict");
        } else {
            ++ilt_no;
            if (v.uclosure_witness)
                c.require(ureplay_flips(a, *v.uclosure_witness), "NotLT witness does not replay");
        }
        if (!c.ok) break;
    }
    c.require(ilt_yes + ilt_no >= 50, "too few conclusive ILT verdicts (" +
                                          std::to_string(ilt_yes + ilt_no) + "/100)");

    // (k,2)-type vs plain k-type coincidence on 0-or-2-children trees
    std::mt19937_64 rng2(708);
    std::function<UnrankedTree(int)> gen02 = [&](int depth) -> UnrankedTree {
        bool leaf = depth <= 0 || (rng2() % 2 == 0);
        std::vector<UnrankedTree> kids;
        if (!leaf) {
            kids.push_back(gen02(depth - 1));
            kids.push_back(gen02(depth - 1));
        }
        return make_unode(static_cast<int>(rng2() % 2), std::move(kids));
    };
    int coincide = 0;
    for (int i = 0; i < 1000; ++i) {
        UnrankedTree t1 = gen02(3), t2 = gen02(3);
        int k = static_cast<int>(rng2() % 4);
        KLTypeRegistry reg(2);
        bool kl_eq = reg.type_of(t1, k) == reg.type_of(t2, k);
        bool plain_eq = utruncations_equal(t1, t2, k);
        if (kl_eq == plain_eq) ++coincide;
    }
    c.require(coincide == 1000, "(k,2)/k-type coincidence failed on random trees");
    c.note(std::to_string(ilt_yes) + " ILT / " + std::to_string(ilt_no) + " not / " +
           std::to_string(unknown) + " unknown over 100 automata; " +
           std::to_string(stutter_checked) + " stutter checks; 1000/1000 type coincidences");
}

void criterion8() {
    Criterion c(8, "guarded-operation type preservation");
    RankedAlphabet alphabet = alpha_abc();
    std::mt19937_64 rng(808);
    int applied = 0;
    while (applied < 1000 && c.ok) {
        Tree t = random_tree(alphabet, 25, rng);
        auto paths = all_paths(t);
        int k = static_cast<int>(rng() % 3);
        GuardedOp op = static_cast<GuardedOp>(rng() % 4);
        for (int attempt = 0; attempt < 30; ++attempt) {
            std::vector<NodePath> nodes;
            std::size_t want = op == GuardedOp::HSwap ? 2 : 3;
            for (std::size_t i = 0; i < want; ++i) nodes.push_back(paths[rng() % paths.size()]);
            bool vertical = op == GuardedOp::VSwap || op == GuardedOp::VStutter;
            if (vertical && nodes[0].empty()) continue;  // interior anchors only
            Tree t2;
            try {
                t2 = apply_guarded(op, t, nodes, k, true);
            } catch (const GuardError&) {
                continue;
            } catch (const std::exception&) {
                continue;
            }
            ++applied;
            c.require(occurrence_keys(t, k + 1) == occurrence_keys(t2, k + 1),
                      "occurrence set at k+1 changed");
            c.require(equiv_k(t, t2, k + 1), "root (k+1)-type changed on an interior instance");
            break;
        }
    }
    c.require(applied == 1000, "could not build 1000 guard-checked applications");
    c.note("1000 applications, occurrence sets and root types at k+1 preserved");
}

}  // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    if (g_failures) {
        std::printf("ACCEPTANCE: %d criterion(s) FAILED\n", g_failures);
        return 1;
    }
    std::printf("ACCEPTANCE: all criteria passed\n");
    return 0;
}
