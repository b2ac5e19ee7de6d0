#pragma once

#include <stdexcept>
#include <string>

namespace klsum {

// Mathematically invalid input (division by zero residue, q | n where forbidden).
struct domain_error : std::domain_error {
    explicit domain_error(const std::string& msg) : std::domain_error(msg) {}
};

// API misuse: bad sizes, out-of-contract arguments, malformed files.
struct usage_error : std::invalid_argument {
    explicit usage_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// A precondition inequality of a bound or estimate does not hold.
struct range_error : std::range_error {
    explicit range_error(const std::string& msg) : std::range_error(msg) {}
};

// Quadrature or summation could not reach the requested accuracy.
struct numerics_error : std::runtime_error {
    explicit numerics_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation would exceed the configured work budget.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace klsum
