#pragma once

#include <stdexcept>
#include <string>

namespace memodyn {

/// Broad failure class; the CLI maps it onto its exit code.
enum class ErrorKind { Validation, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail_validation(const std::string& what) {
  throw Error(ErrorKind::Validation, what);
}

[[noreturn]] inline void fail_numerical(const std::string& what) {
  throw Error(ErrorKind::Numerical, what);
}

}  // namespace memodyn
