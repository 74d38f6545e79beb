#pragma once

#include <stdexcept>
#include <string>

namespace parcelca {

/// Base class for all toolkit errors. `what()` carries a user-facing message.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Geometry that violates polygon invariants (degenerate ring, zero area, ...).
class InvalidGeometryError : public Error {
public:
    explicit InvalidGeometryError(const std::string& msg) : Error(msg) {}
};

/// Bisection could not produce two usable pieces for a polygon.
class BisectFailedError : public Error {
public:
    explicit BisectFailedError(const std::string& msg) : Error(msg) {}
};

/// Malformed or inconsistent input files (parcels, grids, configs, models).
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

/// Invalid argument values or contract violations detected at runtime.
class ValueError : public Error {
public:
    explicit ValueError(const std::string& msg) : Error(msg) {}
};

} // namespace parcelca
