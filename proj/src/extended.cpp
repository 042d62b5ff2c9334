#include "ldbounds/extended.hpp"

#include <stdexcept>

namespace ldb {

double Extended::value() const {
    if (inf_) throw std::logic_error("value() of an infinite marker");
    return v_;
}

std::ostream& operator<<(std::ostream& os, const Extended& e) {
    if (e.is_infinite()) return os << "inf";
    return os << e.value();
}

}  // namespace ldb
