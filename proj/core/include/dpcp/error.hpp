#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpcp {

enum class ErrorKind {
  InvalidDimension,
  EmptyDataset,
  InvalidRatio,
  Parse,
  DegenerateColumn,
  DimensionMismatch,
  MissingLabels,
  UndefinedScale,
  ConditionViolated,
  InvalidStep,
  DivergentSeries,
  DegenerateStep,
  MeasureZeroInitialization,
  ForbiddenStep,
  RankExceeded,
  NotOrthonormal,
  InvalidConfig,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidDimension: return "invalid-dimension";
    case ErrorKind::EmptyDataset: return "empty-dataset";
    case ErrorKind::InvalidRatio: return "invalid-ratio";
    case ErrorKind::Parse: return "parse-error";
    case ErrorKind::DegenerateColumn: return "degenerate-column";
    case ErrorKind::DimensionMismatch: return "dimension-mismatch";
    case ErrorKind::MissingLabels: return "missing-labels";
    case ErrorKind::UndefinedScale: return "undefined-scale";
    case ErrorKind::ConditionViolated: return "condition-violated";
    case ErrorKind::InvalidStep: return "invalid-step";
    case ErrorKind::DivergentSeries: return "divergent-series";
    case ErrorKind::DegenerateStep: return "degenerate-step";
    case ErrorKind::MeasureZeroInitialization: return "measure-zero-initialization";
    case ErrorKind::ForbiddenStep: return "forbidden-step";
    case ErrorKind::RankExceeded: return "rank-exceeded";
    case ErrorKind::NotOrthonormal: return "not-orthonormal";
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::Io: return "io-error";
  }
  return "unknown";
}

}  // namespace dpcp
