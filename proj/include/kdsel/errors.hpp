#pragma once

#include <stdexcept>
#include <string>

namespace kdsel {

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed input data (bad point file, bad direction-number table, ...).
struct ParseError : Error {
    using Error::Error;
};

/// Value outside the mathematical domain of an operation (point outside the
/// unit cube for a uniform kernel, Beta score on the boundary, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Invalid configuration or parameters.
struct ConfigError : Error {
    using Error::Error;
};

/// Caller violated a documented precondition.
struct ContractError : Error {
    using Error::Error;
};

/// A feasibility guard tripped (e.g. the exact L-infinity grid is too large).
struct ResourceError : Error {
    using Error::Error;
};

/// Filesystem failure.
struct IoError : Error {
    using Error::Error;
};

}  // namespace kdsel
