#pragma once

#include <stdexcept>
#include <string>

namespace kdsum {

// Bad input: malformed files, out-of-range parameters, schema mismatches.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A computation produced a non-finite or otherwise unusable result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace kdsum
