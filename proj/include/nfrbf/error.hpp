#pragma once

#include <stdexcept>
#include <string>

namespace nfrbf {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Arguments violate a documented precondition. The CLI maps this to a usage error.
class InvalidInput : public Error {
public:
    using Error::Error;
};

/// Geometry too degenerate to process (collinear nodes, zero-area triangles, open meshes).
class DegenerateGeometry : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed (singular system, failed root bracket, non-finite state).
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace nfrbf
