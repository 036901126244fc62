#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uigym {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Syntax error with a byte offset into the offending source text.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t position)
      : Error(message + " (at offset " + std::to_string(position) + ")"),
        position_(position) {}

  std::size_t position() const { return position_; }

 private:
  std::size_t position_ = 0;
};

/// Domain invariant or input validation failure.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Browser launch, connection, or session-level failure.
class BrowserError : public Error {
 public:
  using Error::Error;
};

/// A script evaluated in the page threw; carries the thrown message.
class ScriptError : public Error {
 public:
  using Error::Error;
};

/// Chat backend failure (transport, auth, retry exhaustion, bad reply).
class BackendError : public Error {
 public:
  using Error::Error;
};

/// A pipeline stage was invoked before its prerequisite artifacts exist.
class PrerequisiteError : public Error {
 public:
  using Error::Error;
};

}  // namespace uigym
