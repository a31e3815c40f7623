#pragma once

#include <stdexcept>
#include <string>

namespace nrm {

// Invalid input is a caller/config problem; runtime covers numerical failures
// and policies that cannot run on the given horizon or capacities.
enum class ErrorKind { invalid_input, runtime };

/// Error carrying a stable kebab-case code (e.g. "nonpositive-capacity").
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& detail = {})
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& code() const noexcept { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

}  // namespace nrm
