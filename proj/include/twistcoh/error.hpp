#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace twistcoh {

enum class Errc {
  InvalidGrid,
  NonFiniteSample,
  GridMismatch,
  NotAdmissible,
  MissingParams,
  InvalidParams,
  DegenerateBump,
  PoleOnLine,
  ZeroTwist,
  IncompatibleCocycle,
  ObstructionNonzero,
  ZeroEigenvalue,
  ConfigError,
};

std::string_view to_string(Errc code);

/// All library failures carry a machine-checkable code plus a human message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace twistcoh
