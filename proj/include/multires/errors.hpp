#pragma once

#include <stdexcept>
#include <string>

namespace multires {

// Bad inputs: dimension mismatches, malformed files, invalid structures.
// The CLI maps this to exit code 2.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown: diverging iterates, non-finite objectives,
// backtracking below the machine-step floor. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace multires
