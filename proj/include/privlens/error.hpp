#pragma once

#include <stdexcept>
#include <string>

namespace privlens {

// Base for every error raised by the library. Subclasses map onto the
// error kinds callers are expected to distinguish.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad or missing configuration: unreadable word list, malformed config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Transient failure (network, 5xx); the operation may succeed if repeated.
class RetryableError : public Error {
 public:
  using Error::Error;
};

// The resource is definitively absent (HTTP 404 and friends).
class PermanentMissingError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Formula inputs that make the result undefined (zero words, zero variance).
class UndefinedInputError : public Error {
 public:
  using Error::Error;
};

// Label not present in the schema, or an inconsistent schema file.
class SchemaError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

}  // namespace privlens
