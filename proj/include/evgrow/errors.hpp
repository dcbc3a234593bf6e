#pragma once

#include <stdexcept>
#include <string>

namespace evgrow {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A requested mean lies outside the family's mean-value space.
struct MeanOutOfRange : Error {
    using Error::Error;
};

// An iterative solver exhausted its iteration budget.
struct NoConvergence : Error {
    using Error::Error;
};

// An operation requiring discrete support was called on a continuous family.
struct NotDiscrete : Error {
    using Error::Error;
};

// Exact enumeration would exceed the configured outcome cap.
struct TooLarge : Error {
    using Error::Error;
};

// The mean set does not intersect the family's mean-value space.
struct InfeasibleSet : Error {
    using Error::Error;
};

// The mean set contains (or touches) the null mean; separation fails.
struct Degenerate : Error {
    using Error::Error;
};

// A root-finder's bracket endpoints do not straddle a sign change.
struct BracketFailure : Error {
    using Error::Error;
};

// Numerical integration failed to reach the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

// Continuous boundary integrals are only implemented for d <= 2.
struct UnsupportedDimension : Error {
    using Error::Error;
};

// A surrounding set's boundary exits the interior of the mean-value space.
struct NotNice : Error {
    using Error::Error;
};

// No mean on the requested side attains the requested KL radius.
struct NoSuchRadius : Error {
    using Error::Error;
};

// A radial estimator was asked for the ray through the origin.
struct OriginRay : Error {
    using Error::Error;
};

// An experiment configuration failed to parse or validate.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace evgrow
