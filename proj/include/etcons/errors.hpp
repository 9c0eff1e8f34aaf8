#pragma once

#include <stdexcept>
#include <string>

namespace etcons {

// Base for every error raised by the library. Each subclass maps to one failure
// family so callers (the CLI in particular) can pick an exit code by type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class ConnectivityError : public TopologyError {
 public:
  using TopologyError::TopologyError;
};

class ModelError : public Error {
 public:
  using Error::Error;
};

class CertificateError : public Error {
 public:
  using Error::Error;
};

class NumericsError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Carries the dotted path of the offending config field, e.g. "trigger.sigma[2]".
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

}  // namespace etcons
