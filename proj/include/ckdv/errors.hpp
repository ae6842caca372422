#pragma once

#include <stdexcept>
#include <string>

namespace ckdv {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A field that should be Hermitian (real in physical space) is not.
class SymmetryViolation : public Error {
public:
    using Error::Error;
};

/// e^{σ|ξ|} would leave the representable range of a double.
class OverflowGuard : public Error {
public:
    using Error::Error;
};

/// The Gevrey-weighted spectrum is not decaying at the top of the band.
class TailDominance : public Error {
public:
    using Error::Error;
};

class InsufficientDecay : public Error {
public:
    using Error::Error;
};

class BlowUp : public Error {
public:
    BlowUp(const std::string& what, double time) : Error(what), time_(time) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class ContractionFailure : public Error {
public:
    ContractionFailure(const std::string& what, double delta) : Error(what), delta_(delta) {}
    double delta() const noexcept { return delta_; }

private:
    double delta_;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = 0, std::string key = {})
        : Error(what), line_(line), key_(std::move(key)) {}
    int line() const noexcept { return line_; }
    const std::string& key() const noexcept { return key_; }

private:
    int line_;
    std::string key_;
};

}  // namespace ckdv
