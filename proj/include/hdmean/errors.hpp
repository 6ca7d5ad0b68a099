#pragma once

#include <stdexcept>
#include <string>

namespace hdmean {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed or non-finite data, or mismatched dimensions.
class InvalidData : public Error {
public:
    using Error::Error;
};

/// Lag outside the range supported by the sample length.
class LagError : public Error {
public:
    using Error::Error;
};

/// Matrix is not symmetric positive semidefinite within tolerance.
class NotPSD : public Error {
public:
    using Error::Error;
};

/// Inconsistent block scheme or too few observations for a block/lag layout.
class BlockError : public Error {
public:
    using Error::Error;
};

/// Singular or ill-conditioned estimator coefficient system.
class SystemError : public Error {
public:
    using Error::Error;
};

/// Variance estimate is not strictly positive.
class DegenerateVariance : public Error {
public:
    using Error::Error;
};

/// Input file does not parse as a rectangular numeric table.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace hdmean
