#pragma once

#include <stdexcept>
#include <string>

namespace bethemps {

// Error taxonomy shared by all modules. The kind maps onto CLI exit codes,
// see tools/bethe_mps_main.cpp.
enum class ErrorKind {
    SizeLimit,        // requested object exceeds a configured size cap
    DegenerateInput,  // pole guard violation, coincident rapidities, ...
    Precondition,     // broken caller contract (non-symmetric input, bad sector, ...)
    Convergence,      // iteration failed to reach tolerance
    SingularMatrix,   // pivot collapse in a linear solve / Newton step
    DomainEscape,     // Newton iterate left the pole-guarded domain
    Validation,       // malformed or inconsistent job configuration
    NullState         // an all-zero state where a state was required
};

class BetheError : public std::runtime_error {
public:
    BetheError(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::SizeLimit: return "size-limit";
        case ErrorKind::DegenerateInput: return "degenerate-input";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::SingularMatrix: return "singular-matrix";
        case ErrorKind::DomainEscape: return "domain-escape";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::NullState: return "null-state";
    }
    return "unknown";
}

}  // namespace bethemps
