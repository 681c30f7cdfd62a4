#pragma once

#include <stdexcept>
#include <string>

namespace fairdiv {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or out-of-contract input (negative values, bad indices, bad JSON).
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// The core instance admits no matching that saturates every agent.
class HallViolation : public Error {
public:
    using Error::Error;
};

/// A proven invariant of the algorithm failed at runtime. Always a bug.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

}  // namespace fairdiv
