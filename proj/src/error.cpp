#include "bdk/error.hpp"

namespace bdk {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::constraint_violation: return "constraint-violation";
        case ErrorCode::model_degeneracy: return "model-degeneracy";
        case ErrorCode::out_of_range: return "out-of-range";
        case ErrorCode::invalid_argument: return "invalid-argument";
        case ErrorCode::series_pole: return "series-pole";
        case ErrorCode::non_convergence: return "non-convergence";
        case ErrorCode::non_normalizable: return "non-normalizable";
        case ErrorCode::cutoff_failure: return "cutoff-failure";
        case ErrorCode::internal_consistency: return "internal-consistency";
        case ErrorCode::eigen_failure: return "eigen-failure";
        case ErrorCode::io: return "io";
    }
    return "unknown";
}

int exit_code(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::constraint_violation:
        case ErrorCode::model_degeneracy:
        case ErrorCode::out_of_range:
        case ErrorCode::invalid_argument:
        case ErrorCode::non_normalizable:
        case ErrorCode::io:
            return 1;
        case ErrorCode::non_convergence:
        case ErrorCode::cutoff_failure:
            return 2;
        case ErrorCode::series_pole:
        case ErrorCode::internal_consistency:
        case ErrorCode::eigen_failure:
            return 3;
    }
    return 3;
}

}  // namespace bdk
