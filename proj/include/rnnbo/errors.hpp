#pragma once

#include <stdexcept>
#include <string>

namespace rnnbo {

// Invalid caller-supplied data: dimension mismatches, out-of-bounds controls,
// malformed files, bad configs.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerical breakdown (e.g. a factorization that fails even after jitter
// escalation). `index` is the failing pivot for factorization errors, -1 otherwise.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what, int index = -1)
        : std::runtime_error(what), index(index) {}

    int index;
};

} // namespace rnnbo
