#pragma once

#include <cmath>
#include <limits>
#include <ostream>

namespace ldb {

// A nonnegative quantity that may be +infinity on purpose (disjoint supports,
// divergent Fisher information, one-sided estimators). Kept apart from
// IEEE inf so an overflow never masquerades as a legitimate infinite value.
class Extended {
public:
    constexpr Extended() = default;
    constexpr explicit Extended(double v) : v_(v) {}

    static constexpr Extended infinite() {
        Extended e;
        e.inf_ = true;
        e.v_ = std::numeric_limits<double>::infinity();
        return e;
    }

    constexpr bool is_infinite() const { return inf_; }
    constexpr bool is_finite() const { return !inf_; }
    // finite value; asking for the value of the marker is a logic error
    double value() const;
    // IEEE view, convenient for comparisons and min()
    constexpr double as_double() const { return inf_ ? std::numeric_limits<double>::infinity() : v_; }

    friend constexpr bool operator==(const Extended& a, const Extended& b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.v_ == b.v_);
    }

private:
    double v_ = 0.0;
    bool inf_ = false;
};

inline Extended min(const Extended& a, const Extended& b) {
    if (a.is_infinite()) return b;
    if (b.is_infinite()) return a;
    return a.value() <= b.value() ? a : b;
}

std::ostream& operator<<(std::ostream& os, const Extended& e);

}  // namespace ldb
