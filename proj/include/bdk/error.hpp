#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bdk {

enum class ErrorCode {
    constraint_violation,  // parameter outside its published range
    model_degeneracy,      // B or D not strictly positive on the lattice
    out_of_range,          // state / level outside the state space
    invalid_argument,
    series_pole,
    non_convergence,
    non_normalizable,
    cutoff_failure,
    internal_consistency,
    eigen_failure,
    io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Process exit status for an error: 1 validation, 2 numerical budget, 3 internal consistency.
int exit_code(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace bdk
