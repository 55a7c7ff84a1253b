#pragma once

#include <stdexcept>
#include <string>

namespace nd {

/// Base class for every failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter is outside its admissible range (r <= 0, beta > 1, unknown id, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The space has too few points for the requested scan.
class DegenerateSpace : public Error {
public:
    using Error::Error;
};

/// A document does not match the expected file schema.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// A distance table violates a metric axiom.
class MetricAxiomError : public Error {
public:
    using Error::Error;
};

/// Two objects that must live on the same space do not.
class SpaceMismatch : public Error {
public:
    using Error::Error;
};

/// Kernel class or source does not fit the requested operation.
class KernelMismatch : public Error {
public:
    using Error::Error;
};

/// An iterative method hit its iteration cap.
class NonConvergence : public Error {
public:
    using Error::Error;
};

/// A file could not be opened, read or written.
class FileError : public Error {
public:
    using Error::Error;
};

}  // namespace nd
