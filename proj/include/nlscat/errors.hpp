#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace nlscat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. Y0 at x <= 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Kernel evaluated on its singular diagonal.
class SingularityError : public Error {
public:
    using Error::Error;
};

/// Invalid construction parameters for grids, direction sets and plans.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// The incident density is too large for the small-data fixed point.
class GateViolation : public Error {
public:
    using Error::Error;
};

/// |z| reached the radius of convergence of the Taylor representation.
class AnalyticityError : public Error {
public:
    using Error::Error;
};

/// Fixed-point iteration failed to contract.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// Dense factorization of I - V M_q failed.
class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// Inverse problem cannot be stabilised by the configured regularisation.
class IllPosedError : public Error {
public:
    using Error::Error;
};

/// Dataset lacks records needed for a finite-difference stencil.
class MissingRecordsError : public IllPosedError {
public:
    MissingRecordsError(const std::string& what, std::vector<std::string> missing)
        : IllPosedError(what), missing_(std::move(missing)) {}
    const std::vector<std::string>& missing() const noexcept { return missing_; }

private:
    std::vector<std::string> missing_;
};

/// Configuration file problem; the message names the offending field path.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace nlscat
