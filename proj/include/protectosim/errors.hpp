#pragma once

#include <stdexcept>

namespace protectosim {

/// Base type for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Net field magnitude is numerically zero; its direction is undefined.
struct DegenerateField : Error {
    using Error::Error;
};

/// Requested environment size exceeds the branch-enumeration cap.
struct CapExceeded : Error {
    using Error::Error;
};

/// A spectral density of exactly zero width was passed where a finite width
/// is required; callers handle the delta-function limit themselves.
struct ZeroWidth : Error {
    using Error::Error;
};

/// Numerical integration could not reach the requested tolerance.
struct QuadratureFailure : Error {
    using Error::Error;
};

/// Bad key=value input: missing, duplicate, unknown or malformed entry.
struct ConfigError : Error {
    using Error::Error;
};

struct UnknownFigure : Error {
    using Error::Error;
};

struct InvalidOverride : Error {
    using Error::Error;
};

struct GridTooLarge : Error {
    using Error::Error;
};

struct EmptyGrid : Error {
    using Error::Error;
};

} // namespace protectosim
