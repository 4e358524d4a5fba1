#pragma once

#include <stdexcept>
#include <string>

namespace femto {

// Bad caller input: mismatched dimensions, malformed states, invalid flags.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Requested object exceeds the configured size cap.
struct CapacityError : std::length_error {
    using std::length_error::length_error;
};

// Input is syntactically fine but outside the mathematically valid range.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// A numerical procedure failed to converge or produced a singular system.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace femto
