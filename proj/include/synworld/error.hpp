#pragma once

#include <stdexcept>
#include <string>

namespace synworld {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller passed a value outside an operation's precondition.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Misconfigured backend, template or rule table.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input document (toolkit, scenario store, checkpoint, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// A chat backend failed to produce a response.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, int status = 0, std::string body_excerpt = {})
      : Error(what), status_(status), body_excerpt_(std::move(body_excerpt)) {}

  /// HTTP status of the last attempt, 0 for network-level failures.
  int status() const noexcept { return status_; }
  const std::string& body_excerpt() const noexcept { return body_excerpt_; }

 private:
  int status_;
  std::string body_excerpt_;
};

class SynthesisError : public Error {
 public:
  using Error::Error;
};

class OptimizerError : public Error {
 public:
  using Error::Error;
};

class ExpansionError : public Error {
 public:
  using Error::Error;
};

/// Raised by an environment backend (not by the agent's LLM).
class EnvironmentError : public Error {
 public:
  using Error::Error;
};

class SimulationError : public Error {
 public:
  using Error::Error;
};

}  // namespace synworld
