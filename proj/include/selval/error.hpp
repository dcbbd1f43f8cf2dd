#pragma once

#include <stdexcept>
#include <string>

namespace selval {

// Bad input: malformed records, invalid parameters, incompatible datasets.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A cost specification that an operation has no closed form for.
class UnsupportedSpecError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// File could not be opened, read or written.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace selval
