#pragma once

#include <stdexcept>
#include <string>

namespace extruder {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A physical parameter violates its invariant (e.g. non-positive pitch).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A state or input lies outside the physical domain of a formula.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The setpoint slope is too small for the gain equations to have positive roots.
class NoPositiveRootError : public Error {
public:
    using Error::Error;
};

/// A root bracket could not be established.
class SolverError : public Error {
public:
    using Error::Error;
};

/// The predictor denominator 1 - F came too close to zero (delay rate reached one).
class FeasibilityError : public Error {
public:
    using Error::Error;
};

/// The partially filled zone filled up completely at the interface.
class SingularityError : public Error {
public:
    using Error::Error;
};

}  // namespace extruder
