#pragma once

#include <stdexcept>
#include <string>

namespace hydra {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A vector/matrix dimension is zero, unsupported, or inconsistent.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// An index falls outside its valid range (e.g. a codebook index).
class RangeError : public Error {
public:
    using Error::Error;
};

/// A structured value violates its own invariants (e.g. a non-bijective permutation).
class InvalidElementError : public Error {
public:
    using Error::Error;
};

/// Modulus smaller than 2 passed to a modular sequence.
class ModulusError : public Error {
public:
    using Error::Error;
};

/// The requested sequence is not purely periodic for the given modulus.
class NotPeriodicError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: singular innovation covariance, non-finite state, ...
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Threshold calibration was asked to work on unusable data.
class CalibrationError : public Error {
public:
    using Error::Error;
};

/// A wire packet failed framing, checksum, or protocol checks.
class PacketError : public Error {
public:
    using Error::Error;
};

/// Scenario configuration is malformed or violates an invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Filesystem input/output failure.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace hydra
