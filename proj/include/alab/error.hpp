#pragma once

#include <stdexcept>
#include <string>

namespace alab {

// Raised for every contract violation and numerical failure in the library.
// The message starts with a short stable reason (e.g. "zero minimal velocity")
// that callers and tests can match on.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& reason, const std::string& detail = {});

  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

// Raised when a computation finished but its verdict is negative
// (e.g. no certificate in range). The CLI maps this to exit code 2.
class VerdictNegative : public Error {
 public:
  using Error::Error;
};

}  // namespace alab
