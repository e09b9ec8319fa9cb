#pragma once

#include <stdexcept>
#include <string>

namespace jcsim {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension_mismatch"; }
};

/// A documented precondition of an operation was not met.
class PreconditionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "precondition"; }
};

/// Raised by the integrators; carries the last time successfully reached.
class IntegrationError : public Error {
 public:
  IntegrationError(const std::string& what, double t_reached)
      : Error(what), t_reached_(t_reached) {}
  const char* kind() const noexcept override { return "integration"; }
  double t_reached() const noexcept { return t_reached_; }

 private:
  double t_reached_;
};

/// Configuration rejected; `path()` is the JSON path of the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& what)
      : Error(path.empty() ? what : path + ": " + what), path_(std::move(path)) {}
  const char* kind() const noexcept override { return "config"; }
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace jcsim
