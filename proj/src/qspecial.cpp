#include "bdk/qspecial.hpp"

#include <sstream>

namespace bdk::qspecial {

void require_unit_interval_q(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        std::ostringstream os;
        os << "q must satisfy 0 < q < 1 (got " << q << ")";
        fail(ErrorCode::constraint_violation, os.str());
    }
}

}  // namespace bdk::qspecial
