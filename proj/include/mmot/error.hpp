#pragma once

#include <stdexcept>
#include <string>

namespace mmot {

enum class Errc {
  Parse,
  InvalidInstance,
  InvalidPlan,
  IndexOutOfRange,
  DimensionMismatch,
  IterationLimit,
  GridTooLarge,
  BudgetExceeded,
  NotMonotone,
  MarginalMismatch,
  NonRationalInput,
  NotImproving,
  CertificateInvalid,
  InputNotSplitting,
  BasePointNotInG,
  InfinitePotentialAtBase,
  UnknownCost,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

inline const char* errc_name(Errc code) {
  switch (code) {
    case Errc::Parse: return "Parse";
    case Errc::InvalidInstance: return "InvalidInstance";
    case Errc::InvalidPlan: return "InvalidPlan";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::IterationLimit: return "IterationLimit";
    case Errc::GridTooLarge: return "GridTooLarge";
    case Errc::BudgetExceeded: return "BudgetExceeded";
    case Errc::NotMonotone: return "NotMonotone";
    case Errc::MarginalMismatch: return "MarginalMismatch";
    case Errc::NonRationalInput: return "NonRationalInput";
    case Errc::NotImproving: return "NotImproving";
    case Errc::CertificateInvalid: return "CertificateInvalid";
    case Errc::InputNotSplitting: return "InputNotSplitting";
    case Errc::BasePointNotInG: return "BasePointNotInG";
    case Errc::InfinitePotentialAtBase: return "InfinitePotentialAtBase";
    case Errc::UnknownCost: return "UnknownCost";
  }
  return "Unknown";
}

}  // namespace mmot
