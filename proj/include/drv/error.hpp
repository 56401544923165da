#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace drv {

// Every recoverable failure carries a stable machine-readable code
// (e.g. "PATH_NOT_FOUND", "SYNTAX_ERROR") next to the human message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace drv
