#pragma once

#include <stdexcept>
#include <string>

namespace topic_bandit {

/// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class InvalidTopicError : public Error {
 public:
  using Error::Error;
};

/// Fewer topics carry observations than the requested selection size.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

/// Dataset could not be parsed. `line()` is 1-based, 0 when not line-specific.
class LoadError : public Error {
 public:
  LoadError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Stored values disagree with values recomputed from their sources.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

/// A replay topic has no undrawn records left in this run.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

/// The world cannot answer oracle questions (no true means).
class UnsupportedWorldError : public Error {
 public:
  using Error::Error;
};

class AdapterError : public Error {
 public:
  using Error::Error;
};

class AdapterTimeoutError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class MalformedResponseError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

class OutOfRangeError : public AdapterError {
 public:
  using AdapterError::AdapterError;
};

/// Run artifacts on disk are missing or inconsistent.
class ArtifactError : public Error {
 public:
  using Error::Error;
};

}  // namespace topic_bandit
