#pragma once

#include <stdexcept>
#include <string>

namespace brd {

/// Error categories. Each maps to a distinct process exit status in the CLI.
enum class ErrorKind {
  Config = 2,      // invalid configuration, dimension mismatch
  Schema = 3,      // dataset header / row errors
  Provider = 4,    // embedding provider unavailable or misbehaving
  Format = 5,      // bad magic, truncated or corrupt files
  Stale = 6,       // embedding cache does not match the current texts
  Divergence = 7,  // non-finite loss during training
  Io = 8,          // unreadable / unwritable paths
  Input = 9,       // invalid call arguments (empty text, bad probabilities)
  Checkpoint = 10, // checkpoint version / architecture mismatch
  Refused = 11,    // input cleaned to nothing, nothing to predict
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

/// Provider errors may succeed on retry; `index` is the failing input position, or -1.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, long index = -1, bool retryable = true)
      : Error(ErrorKind::Provider, what), index_(index), retryable_(retryable) {}

  long index() const noexcept { return index_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  long index_;
  bool retryable_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace brd
