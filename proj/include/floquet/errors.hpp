#pragma once

#include <stdexcept>
#include <string>

namespace floquet {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition of a kernel (non-Hermitian input, ...).
class ContractError : public Error {
public:
    using Error::Error;
};

class NumericError : public Error {
public:
    NumericError(const std::string& what, long iterations)
        : Error(what + " (iteration limit " + std::to_string(iterations) + ")"), iterations_(iterations) {}
    long iterations() const { return iterations_; }

private:
    long iterations_;
};

class ParseError : public Error {
public:
    ParseError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class BoundaryError : public Error {
public:
    BoundaryError(const std::string& what, double lost_norm)
        : Error(what + " (lost norm " + std::to_string(lost_norm) + ")"), lost_norm_(lost_norm) {}
    double lost_norm() const { return lost_norm_; }

private:
    double lost_norm_;
};

class NormalizationError : public Error {
public:
    using Error::Error;
};

class StructuralError : public Error {
public:
    using Error::Error;
};

class PromiseViolation : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class GapViolation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class OverlapViolation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

}  // namespace floquet
