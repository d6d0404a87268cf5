#pragma once

#include <stdexcept>
#include <string>

namespace steach {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration values (layer sizes, env parameters, config files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Vector or matrix dimensions that do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf encountered where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Caller violated an operation precondition (empty batch, wrong owner, ...).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Filesystem or checkpoint format failure.
class IoError : public Error {
 public:
  using Error::Error;
};

/// A training-epoch stage failed; `stage()` names which one.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what)
      : Error("stage '" + stage + "' failed: " + what), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace steach
