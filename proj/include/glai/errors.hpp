#pragma once

#include <stdexcept>

namespace glai {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Shape or length disagreement between operands.
struct DimensionError : Error {
    using Error::Error;
};

// File could not be opened, read or written.
struct IoError : Error {
    using Error::Error;
};

// Malformed input data (CSV, IDX, JSON); the message carries the location.
struct ParseError : Error {
    using Error::Error;
};

// Invalid configuration or argument value.
struct ConfigError : Error {
    using Error::Error;
};

// round(rho * n_L) < n_{L+1}: the reduced last hidden layer would choke the output.
struct BottleneckError : Error {
    using Error::Error;
};

// The reduced architecture has at least as many parameters as the original.
struct ReducedNotSmallerError : Error {
    using Error::Error;
};

// Architectures with n_L == n_{L+1} fall outside the parity scheme.
struct UnsupportedArchError : Error {
    using Error::Error;
};

// A full path table would exceed the configured budget.
struct PathBudgetError : Error {
    using Error::Error;
};

// A path count does not fit in 64 bits.
struct CountOverflowError : Error {
    using Error::Error;
};

// Training produced a NaN or infinite loss.
struct NonFiniteLossError : Error {
    using Error::Error;
};

}  // namespace glai
