#pragma once

#include <stdexcept>
#include <string>

namespace imr {

/// Base class for all failures raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input (XES, CSV, rule files, tree text).
class ParseError : public Error {
public:
    using Error::Error;
};

/// Alphabet exceeds the configured bipartition enumeration cap.
class CapExceededError : public Error {
public:
    using Error::Error;
};

/// Bounded language enumeration exceeded its trace cap.
class LanguageOverflowError : public Error {
public:
    using Error::Error;
};

} // namespace imr
