#pragma once

#include <stdexcept>
#include <string>

namespace sepvol {

enum class Errc {
  IndexOutOfRange,
  DuplicatePair,
  ShapeMismatch,
  ZeroDiagonal,
  NonPositiveRatio,
  DomainError,
  ArityMismatch,
  MissingS,
  MissingJacobian,
  DegenerateScenario,
  UnsupportedRelaxation,
  UnknownSuite,
  ParseError,
};

inline const char* errc_name(Errc e) {
  switch (e) {
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DuplicatePair: return "DuplicatePair";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::ZeroDiagonal: return "ZeroDiagonal";
    case Errc::NonPositiveRatio: return "NonPositiveRatio";
    case Errc::DomainError: return "DomainError";
    case Errc::ArityMismatch: return "ArityMismatch";
    case Errc::MissingS: return "MissingS";
    case Errc::MissingJacobian: return "MissingJacobian";
    case Errc::DegenerateScenario: return "DegenerateScenario";
    case Errc::UnsupportedRelaxation: return "UnsupportedRelaxation";
    case Errc::UnknownSuite: return "UnknownSuite";
    case Errc::ParseError: return "ParseError";
  }
  return "?";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace sepvol
