#ifndef POHMM_ERRORS_HPP
#define POHMM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace pohmm {

/// Bad arguments or data: mismatched alphabets, out-of-range symbols,
/// empty datasets, malformed schedules.
class InvalidInputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An exact enumeration would exceed the configured limit.  Signals that
/// the caller should fall back to sampling-based estimates.
class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A file could not be parsed; the message names the offending line.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A serialized file declares a format version this build does not read.
class UnsupportedVersionError : public ParseError {
public:
  using ParseError::ParseError;
};

} // namespace pohmm

#endif
