#pragma once

#include <stdexcept>
#include <string>

namespace sads_dirac {

/** @brief Base class for every error raised by the library. */
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
    virtual const char* kind() const noexcept { return "error"; }
};

class InvalidParameter : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "invalid_parameter"; }
};

// Argument outside the domain of a map (e.g. r <= r_h).
class DomainError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "domain_error"; }
};

// exp(i*lambda*x) would overflow a double.
class ScaledRepresentationError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "scaled_representation"; }
};

class OutOfStrip : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "out_of_strip"; }
};

class ConvergenceError : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "convergence"; }
};

class AtResonance : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "at_resonance"; }
};

class Inconclusive : public Error {
public:
    using Error::Error;
    const char* kind() const noexcept override { return "inconclusive"; }
};

}  // namespace sads_dirac
