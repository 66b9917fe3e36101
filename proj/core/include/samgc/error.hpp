#pragma once

#include <stdexcept>
#include <string>

namespace samgc {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Tensor dimension disagreements.
struct ShapeError : Error {
    using Error::Error;
};

// Invalid run or layer configuration (k >= n, hop sets too shallow, bad widths).
struct ConfigError : Error {
    using Error::Error;
};

// Malformed or inconsistent input data (bad file lines, out-of-range labels).
struct DataError : Error {
    using Error::Error;
};

// API misuse (double backward, non-scalar loss, unsorted node subsets).
struct ContractError : Error {
    using Error::Error;
};

// Filesystem and serialization failures.
struct IoError : Error {
    using Error::Error;
};

} // namespace samgc
