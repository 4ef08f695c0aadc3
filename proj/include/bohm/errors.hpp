#pragma once

#include <stdexcept>
#include <string>

namespace bohm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// |Psi|^2 at the evaluation point is below the singularity floor.
class NearNodeSingularity : public Error {
public:
    using Error::Error;
};

/// The node lattice is at infinity (sin((wx - wy) t) vanishes).
class NodesAtInfinity : public Error {
public:
    using Error::Error;
};

/// The state has no nodal lattice (c1 == 0 or c2 == 0).
class NoNodes : public Error {
public:
    using Error::Error;
};

class XPointNotFound : public Error {
public:
    using Error::Error;
};

class NotHyperbolic : public Error {
public:
    using Error::Error;
};

class SampleDtMismatch : public Error {
public:
    using Error::Error;
};

class GeometryMismatch : public Error {
public:
    using Error::Error;
};

class HorizonTooShort : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bohm
