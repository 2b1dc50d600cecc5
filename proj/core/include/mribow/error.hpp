#pragma once

#include <stdexcept>
#include <string>

namespace mribow {

/// Bad run configuration or command-line usage. CLI exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data. CLI exit code 3.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical invariant violated at runtime. CLI exit code 4.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mribow
