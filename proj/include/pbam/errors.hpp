#pragma once

#include <stdexcept>
#include <string>

namespace pbam {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands belong to different algebra instances.
class OwnerMismatch : public Error {
public:
    using Error::Error;
};

/// 1 + a is singular in the unitization.
class NotQuasiInvertible : public Error {
public:
    using Error::Error;
};

class LevelOutOfRange : public Error {
public:
    using Error::Error;
};

/// Input lies outside the domain of the inverse square root calculus.
class DomainViolation : public Error {
public:
    using Error::Error;
};

class DivergentSeries : public Error {
public:
    using Error::Error;
};

class ThresholdNotFound : public Error {
public:
    using Error::Error;
};

class InvalidHomotopy : public Error {
public:
    using Error::Error;
};

/// Composition of families whose algebras do not line up.
class AlgebraMismatch : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace pbam
