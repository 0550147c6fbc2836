#pragma once

#include <stdexcept>
#include <string>

namespace unitrace {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed input data (bad row, non-integer value, value out of domain).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Timestamp grid is irregular or contradicts declared metadata.
class GridError : public Error {
public:
    using Error::Error;
};

/// Duplicate (series_id, timestamp) pair in the input.
class DuplicateError : public Error {
public:
    using Error::Error;
};

/// A dataset invariant was violated at construction time.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Window or index out of range (t + k > m, k > m, ...).
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Unknown series id.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration (synth config fields, missing epoch mapping, ...).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Mismatched input shapes (e.g. correlation inputs of different length).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Statistically degenerate input (zero variance, all-missing dataset).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// Series with non-overlapping time ranges cannot be aligned.
class AlignmentError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (missing file, unwritable output).
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace unitrace
