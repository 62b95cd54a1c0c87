#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace mutlab {

// Error with a stable machine-readable code alongside the human message.
// Codes are short snake_case identifiers ("model_not_found", "unmatched_mutant_id", ...).
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace mutlab
