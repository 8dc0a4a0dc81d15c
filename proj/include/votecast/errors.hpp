#pragma once

#include <stdexcept>
#include <string>

namespace votecast {

/// Invalid or inconsistent input data (unreadable files, malformed rows,
/// values out of range). Mapped to exit code 2 by the CLI.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration or command usage. Mapped to exit code 1 by the CLI.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A support curve cannot satisfy its constraints for the requested
/// target mean and family parameters.
class InfeasibleError : public DataError {
public:
    using DataError::DataError;
};

} // namespace votecast
