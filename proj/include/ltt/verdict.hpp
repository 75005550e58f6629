#ifndef LTT_VERDICT_HPP
#define LTT_VERDICT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ltt/bigint.hpp"
#include "ltt/guarded.hpp"
#include "ltt/tree.hpp"

namespace ltt {

struct UnrankedNode;
using UnrankedTree = std::shared_ptr<const UnrankedNode>;

enum class Status { Holds, Violated, Unknown };
std::string to_string(Status s);

// Exploration budgets.  Exhaustion yields Unknown, never an error.
struct Budget {
    std::uint64_t max_typed_states = 20000;
    std::uint64_t max_behaviors = 20000;
    std::uint64_t max_product_states = 60000;
    std::uint64_t max_steps = 20u * 1000 * 1000;  // generic work counter
    std::uint64_t max_witness_nodes = 2u * 1000 * 1000;

    Budget scaled(double f) const {
        Budget b = *this;
        auto mul = [&](std::uint64_t v) {
            double x = static_cast<double>(v) * f;
            return x < 1 ? std::uint64_t(1) : static_cast<std::uint64_t>(x);
        };
        b.max_typed_states = mul(b.max_typed_states);
        b.max_behaviors = mul(b.max_behaviors);
        b.max_product_states = mul(b.max_product_states);
        b.max_steps = mul(b.max_steps);
        return b;
    }
};

// A concrete guarded-operation instance on a ranked tree; replaying it with
// apply_guarded must flip acceptance when attached to a Violated verdict.
struct OpInstance {
    GuardedOp op;
    Tree tree;
    std::vector<NodePath> nodes;
    int k = 0;
};

enum class UOp { HSwap, HTransfer, VSwap, VStutter, HStutter };
std::string to_string(UOp op);

// Unranked counterpart; paths address canonical child order.
struct UOpInstance {
    UOp op;
    UnrankedTree tree;
    std::vector<NodePath> nodes;
    int k = 0;
    int l = 1;
};

struct ClosureVerdict {
    Status status = Status::Unknown;
    std::optional<OpInstance> witness;
    std::optional<UOpInstance> uwitness;
    // testability violations: (member, non-member), equivalent at the
    // checked parameter
    std::optional<std::pair<Tree, Tree>> witness_pair;
    std::optional<std::pair<UnrankedTree, UnrankedTree>> uwitness_pair;
    std::string note;
    std::map<std::string, std::uint64_t> explored;

    bool holds() const { return status == Status::Holds; }
    bool violated() const { return status == Status::Violated; }

    static ClosureVerdict yes(std::string note_ = "") {
        ClosureVerdict v;
        v.status = Status::Holds;
        v.note = std::move(note_);
        return v;
    }
    static ClosureVerdict unknown(std::string note_) {
        ClosureVerdict v;
        v.status = Status::Unknown;
        v.note = std::move(note_);
        return v;
    }
};

enum class LtStatus { LT, NotLT, Unknown };
enum class LtReason { TestableAt, NotTame, NotStutter, BoundCheckFailed, BudgetExceeded };
std::string to_string(LtStatus s);
std::string to_string(LtReason r);

struct LtVerdict {
    LtStatus status = LtStatus::Unknown;
    LtReason reason = LtReason::BudgetExceeded;
    std::optional<int> kappa;
    std::optional<int> lambda;            // unranked deciders only
    std::optional<int> tame_at_k;         // smallest k certified tame, if any
    std::optional<int> tame_at_l;         // unranked ladder parameter
    std::vector<std::string> witness_terms;
    std::optional<OpInstance> closure_witness;
    std::optional<UOpInstance> uclosure_witness;
    std::string via;  // which pipeline step produced the verdict
    std::map<std::string, std::uint64_t> explored;
};

}  // namespace ltt

#endif
