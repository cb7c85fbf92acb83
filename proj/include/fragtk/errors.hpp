#pragma once

#include <stdexcept>
#include <string>

namespace fragtk {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input text that could not be parsed; message carries file/line context.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Data violates a documented invariant or precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Data is well-formed but unusable (empty, degenerate, carries no information).
class DataError : public Error {
public:
    using Error::Error;
};

/// Programming contract broken (dimension mismatch, use of an unfitted model).
class ContractError : public Error {
public:
    using Error::Error;
};

/// A required input file or artifact is absent.
class MissingInputError : public Error {
public:
    using Error::Error;
};

} // namespace fragtk
