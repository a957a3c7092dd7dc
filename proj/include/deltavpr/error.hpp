#pragma once

#include <stdexcept>
#include <string>

namespace deltavpr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid parameters or an inconsistent configuration (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Malformed, inconsistent or unreadable data (CLI exit code 3).
class DataError : public Error {
public:
    using Error::Error;
};

} // namespace deltavpr
