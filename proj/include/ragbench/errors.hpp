#pragma once

#include <stdexcept>
#include <string>

namespace ragbench {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid or inconsistent configuration. CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Network-level failure (connect/send/receive). Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The remote spoke, but the payload violates the wire contract.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

/// The backend returned an error payload. Not retryable.
class BackendError : public Error {
 public:
  using Error::Error;
};

/// The backend cannot provide a required capability (e.g. logprobs).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Scripted-generator table mismatch or misuse.
class ScriptError : public Error {
 public:
  using Error::Error;
};

}  // namespace ragbench
