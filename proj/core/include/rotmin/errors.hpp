#pragma once

#include <stdexcept>
#include <string>

namespace rotmin {

/// Base for every failure raised by the library. Callers that only care
/// about "did the numerics work" catch this.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A state left the open region where the profile ODE and the geometric
/// quantities are defined (unit circle, rotation axis, |g| >= 1).
class DomainError : public Error {
public:
    using Error::Error;
};

class StepLimitExceeded : public Error {
public:
    using Error::Error;
};

class NonFiniteDerivative : public Error {
public:
    NonFiniteDerivative(const std::string& what, double u) : Error(what), u_(u) {}
    double at() const noexcept { return u_; }

private:
    double u_;
};

class EventNotFound : public Error {
public:
    using Error::Error;
};

class NoSignChange : public Error {
public:
    using Error::Error;
};

class NonConvergence : public Error {
public:
    using Error::Error;
};

/// Raised by the shooting residual when a0 lies outside the oscillating
/// regime and no meaningful f1(T/2) exists.
class OutOfRegime : public Error {
public:
    using Error::Error;
};

}  // namespace rotmin
