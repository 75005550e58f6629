#include "ltt/verdict.hpp"

namespace ltt {

std::string to_string(Status s) {
    switch (s) {
        case Status::Holds: return "holds";
        case Status::Violated: return "violated";
        case Status::Unknown: return "unknown";
    }
    return "?";
}

std::string to_string(UOp op) {
    switch (op) {
        case UOp::HSwap: return "hswap";
        case UOp::HTransfer: return "htransfer";
        case UOp::VSwap: return "vswap";
        case UOp::VStutter: return "vstutter";
        case UOp::HStutter: return "hstutter";
    }
    return "?";
}

std::string to_string(LtStatus s) {
    switch (s) {
        case LtStatus::LT: return "LT";
        case LtStatus::NotLT: return "NotLT";
        case LtStatus::Unknown: return "Unknown";
    }
    return "?";
}

std::string to_string(LtReason r) {
    switch (r) {
        case LtReason::TestableAt: return "TestableAt";
        case LtReason::NotTame: return "NotTame";
        case LtReason::NotStutter: return "NotStutter";
        case LtReason::BoundCheckFailed: return "BoundCheckFailed";
        case LtReason::BudgetExceeded: return "BudgetExceeded";
    }
    return "?";
}

}  // namespace ltt
