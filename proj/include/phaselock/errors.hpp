#pragma once

#include <stdexcept>
#include <string>

namespace phaselock {

/// Base of every exception thrown by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed graph6 input.
struct Graph6Error : Error {
    using Error::Error;
};

/// A graph that breaks the cubic / connectivity invariants an operation needs.
struct InvalidGraph : Error {
    using Error::Error;
};

/// Size or parameter outside an operation's supported domain.
struct DomainError : Error {
    using Error::Error;
};

/// Vector length does not match the graph order.
struct DimensionMismatch : Error {
    using Error::Error;
};

/// A numerical procedure failed (singular system, divergence, no bracket).
struct NumericalError : Error {
    using Error::Error;
};

}  // namespace phaselock
