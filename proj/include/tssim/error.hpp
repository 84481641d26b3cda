#pragma once

#include <stdexcept>
#include <string>

namespace tssim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input data: bad CSV, unparseable fields, conflicting duplicates.
class ParseError : public Error {
public:
    using Error::Error;
};

/// A country, indicator or decomposition key that does not exist.
class LookupError : public Error {
public:
    using Error::Error;
};

/// Arguments that violate an operation's preconditions.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Numerical failure during iterative computation.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace tssim
