#pragma once

#include <stdexcept>
#include <string>

namespace waistlab {

// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Caller misuse: inconsistent shapes, malformed input, bad options.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SamplingFailure : std::runtime_error {
    SamplingFailure(const std::string& what, double rate)
        : std::runtime_error(what), acceptance_rate(rate) {}
    double acceptance_rate;
};

}  // namespace waistlab
