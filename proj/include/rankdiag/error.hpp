#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rankdiag {

/// Base of every error raised by the toolkit. Input-data problems derive
/// from DataError, filesystem problems from IoError.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class DataError : public Error {
  public:
    using Error::Error;
};

class IoError : public Error {
  public:
    using Error::Error;
};

/// A record that does not have the expected shape. Carries the 1-based line.
class ParseError : public DataError {
  public:
    ParseError(std::string source, std::size_t line, const std::string& what)
        : DataError(source + ":" + std::to_string(line) + ": " + what),
          source_(std::move(source)),
          line_(line) {}

    const std::string& source() const noexcept { return source_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string source_;
    std::size_t line_;
};

/// Well-formed records that violate a collection invariant (duplicate ids,
/// rank gaps, missing references).
class StructuralError : public DataError {
  public:
    using DataError::DataError;
};

/// Value outside its admissible domain (e.g. a relevance grade of 7).
class RangeError : public DataError {
  public:
    using DataError::DataError;
};

/// Index file with wrong magic bytes or an unsupported version.
class FormatError : public DataError {
  public:
    using DataError::DataError;
};

/// Index file that is truncated or fails its checksum.
class CorruptionError : public DataError {
  public:
    using DataError::DataError;
};

}  // namespace rankdiag
