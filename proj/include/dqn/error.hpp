#pragma once

#include <stdexcept>
#include <string>

namespace dqn {

/// Invalid or inconsistent run configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unreadable, malformed or shape-mismatched data (CLI exit code 3).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure during a run, e.g. a non-finite loss (CLI exit code 4).
class RuntimeAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace dqn
