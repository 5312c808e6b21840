#pragma once

#include <stdexcept>
#include <string>

namespace swarmsteer {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two agents occupy (numerically) the same position.
struct CollocationError : Error {
    using Error::Error;
};

// A frame tangent collapsed below the renormalization threshold.
struct FrameDegeneracyError : Error {
    using Error::Error;
};

// Non-finite state produced by a dynamics step.
struct IntegrationError : Error {
    using Error::Error;
};

// Reduced MMC state left its domain (rho <= 0).
struct DomainExitError : Error {
    using Error::Error;
};

// Level-set projection did not converge within the iteration cap.
struct ProjectionError : Error {
    using Error::Error;
};

struct InsufficientAgentsError : Error {
    using Error::Error;
};

// Neighborhood COM velocity still below threshold after the K+1 fallback.
struct DegenerateNeighborhoodError : Error {
    using Error::Error;
};

// An input violated a documented precondition (e.g. non-unit direction).
struct ContractViolationError : Error {
    using Error::Error;
};

// Series passed to a comparison do not line up.
struct AlignmentError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct CsvSchemaError : Error {
    using Error::Error;
};

}  // namespace swarmsteer
