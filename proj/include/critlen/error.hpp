#pragma once

#include <stdexcept>
#include <string>

namespace critlen {

enum class ErrorKind {
  InvalidInput,
  NonFinite,
  Overflow,
  RankDeficient,
  NotPositive,
  SingularTransfer,
  SingularExpansion,
  OutOfDomain,
  ZeroDenominator,
  Exhausted,
  NotDesignSpace,
  ConstantsAbsent,
  NotGoodForDesign,
  LevelsMissing,
  QuadratureFailure,
  NoSignChange,
  OutOfRegime,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the kinds above so that
/// callers (the CLI in particular) can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::Overflow: return "Overflow";
    case ErrorKind::RankDeficient: return "RankDeficient";
    case ErrorKind::NotPositive: return "NotPositive";
    case ErrorKind::SingularTransfer: return "SingularTransfer";
    case ErrorKind::SingularExpansion: return "SingularExpansion";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::Exhausted: return "Exhausted";
    case ErrorKind::NotDesignSpace: return "NotDesignSpace";
    case ErrorKind::ConstantsAbsent: return "ConstantsAbsent";
    case ErrorKind::NotGoodForDesign: return "NotGoodForDesign";
    case ErrorKind::LevelsMissing: return "LevelsMissing";
    case ErrorKind::QuadratureFailure: return "QuadratureFailure";
    case ErrorKind::NoSignChange: return "NoSignChange";
    case ErrorKind::OutOfRegime: return "OutOfRegime";
  }
  return "Unknown";
}

}  // namespace critlen
