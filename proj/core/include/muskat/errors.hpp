#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MassNotUnit : Error {
    explicit MassNotUnit(double mass)
        : Error("density mass is " + std::to_string(mass) + ", expected 1") {}
};

struct SizeMismatch : Error {
    using Error::Error;
};

struct NonMonotone : Error {
    using Error::Error;
};

struct NonMonotoneMap : Error {
    using Error::Error;
};

struct DomainOverflow : Error {
    using Error::Error;
};

struct NegativeTime : Error {
    using Error::Error;
};

struct NonAdmissible : Error {
    using Error::Error;
};

struct ZeroMass : Error {
    using Error::Error;
};

struct NoConvergence : Error {
    using Error::Error;
};

struct CflViolation : Error {
    using Error::Error;
};

struct NoOverlap : Error {
    using Error::Error;
};

struct DegenerateFit : Error {
    using Error::Error;
};

struct SchemaError : Error {
    using Error::Error;
};

struct PresetOutOfDomain : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

} // namespace muskat
