#include "twistcoh/error.hpp"

namespace twistcoh {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidGrid: return "InvalidGrid";
    case Errc::NonFiniteSample: return "NonFiniteSample";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::NotAdmissible: return "NotAdmissible";
    case Errc::MissingParams: return "MissingParams";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::DegenerateBump: return "DegenerateBump";
    case Errc::PoleOnLine: return "PoleOnLine";
    case Errc::ZeroTwist: return "ZeroTwist";
    case Errc::IncompatibleCocycle: return "IncompatibleCocycle";
    case Errc::ObstructionNonzero: return "ObstructionNonzero";
    case Errc::ZeroEigenvalue: return "ZeroEigenvalue";
    case Errc::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace twistcoh
