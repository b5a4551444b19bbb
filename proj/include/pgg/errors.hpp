#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace pgg {

// Error taxonomy shared by the library and the CLI. `kValidation` maps to
// exit code 1 (bad inputs), `kNumerical` to exit code 2 (consistency or
// convergence failures detected at runtime).
enum class ErrorKind { kValidation = 1, kNumerical = 2 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string name, const std::string& message)
      : std::runtime_error(message), kind_(kind), name_(std::move(name)) {}

  ErrorKind kind() const noexcept { return kind_; }

  // Stable machine-readable identifier, e.g. "InvalidOrder", "NoFiniteCap".
  const std::string& name() const noexcept { return name_; }

 private:
  ErrorKind kind_;
  std::string name_;
};

[[noreturn]] inline void throw_validation(std::string name, const std::string& message) {
  throw Error(ErrorKind::kValidation, std::move(name), message);
}

[[noreturn]] inline void throw_numerical(std::string name, const std::string& message) {
  throw Error(ErrorKind::kNumerical, std::move(name), message);
}

}  // namespace pgg
