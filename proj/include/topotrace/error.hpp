#pragma once

#include <stdexcept>
#include <string>

namespace topotrace {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad caller input: out-of-range coordinates, mismatched sizes, invalid config.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed or unreadable file.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace topotrace
