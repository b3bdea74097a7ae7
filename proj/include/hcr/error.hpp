#pragma once

#include <stdexcept>
#include <string>

namespace hcr {

enum class Errc {
  InvalidArgument,
  InvalidState,
  MaxIterExceeded,
  SingularActiveSet,
  DegenerateDenominator,
  NotApplicable,
  ParseError,
};

const char* to_string(Errc code) noexcept;

/// Library-wide exception; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hcr
