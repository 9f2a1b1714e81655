#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hl {

enum class ErrorKind {
  UnsupportedAlphabet,
  OutOfRange,
  UnknownNode,
  InvalidInput,
  CapExceeded,
  OracleContradiction,
  Incompatibility,
  PreconditionViolation,
  InsufficientSpread,
  Internal,
};

std::string_view error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Counts search steps and throws CapExceeded once the limit is passed.
class Budget {
 public:
  explicit Budget(unsigned long long limit) : limit_(limit) {}

  void tick(std::string_view what = "search") {
    if (++used_ > limit_) {
      throw Error(ErrorKind::CapExceeded,
                  std::string(what) + " exceeded cap of " + std::to_string(limit_) + " steps");
    }
  }
  bool exhausted() const { return used_ >= limit_; }
  unsigned long long used() const { return used_; }
  unsigned long long limit() const { return limit_; }

 private:
  unsigned long long limit_;
  unsigned long long used_ = 0;
};

}  // namespace hl
