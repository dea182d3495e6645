#pragma once

#include <stdexcept>
#include <string>

namespace netrisk {

// Out-of-domain input: bad parameter, malformed file content, violated precondition.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numeric routine failed to produce a result (non-finite values, no bracket found).
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, read, written or renamed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace netrisk
