#pragma once

#include <stdexcept>
#include <string>

namespace kinefit {

// Base class for all errors raised by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// rotations
struct NonUnitAxis : Error {
    using Error::Error;
};
struct GimbalLock : Error {
    using Error::Error;
};
struct DegenerateDirection : Error {
    using Error::Error;
};

// chain
struct InconsistentChain : Error {
    using Error::Error;
};
struct ZeroLengthLink : Error {
    using Error::Error;
};

// body model
struct InvalidLength : Error {
    using Error::Error;
};
struct OutOfBounds : Error {
    OutOfBounds(const std::string& what, int idx) : Error(what), index(idx) {}
    int index;
};

// losses
struct DegenerateTarget : Error {
    using Error::Error;
};
struct SequenceTooShort : Error {
    using Error::Error;
};

// solver
struct NonFiniteObjective : Error {
    using Error::Error;
};

// motion generation
struct InfeasibleSchedule : Error {
    using Error::Error;
};

// evaluation
struct LengthMismatch : Error {
    using Error::Error;
};

// file I/O: `where` carries a human-readable location (file, frame, field)
struct ValidationError : Error {
    ValidationError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), location(where) {}
    std::string location;
};
struct IoError : Error {
    using Error::Error;
};

}  // namespace kinefit
