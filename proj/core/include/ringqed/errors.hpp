#pragma once

#include <stdexcept>
#include <string>

namespace ringqed {

// Bad input: violated invariant, malformed config, out-of-range argument.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A computation that could not produce a trustworthy number
// (singular system, step-size underflow, fit that did not converge).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ringqed
