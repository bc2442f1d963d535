#ifndef BCKM_ERROR_HPP
#define BCKM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bckm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or values that break a documented precondition.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed CSV or JSON input. The message carries the offending row when known.
class ParseError : public Error {
public:
    using Error::Error;
};

/// The constraint set admits no assignment (found by precheck or by LP phase 1).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

} // namespace bckm

#endif
