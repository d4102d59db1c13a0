#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace size_lens {

/// Coarse error class. The CLI maps each one to a distinct exit code.
enum class ErrorKind { Ingest, Solver, Statistics, Io, Usage };

enum class ErrorCode {
  // matrices / ingest
  NonBinaryCell,
  DuplicateLabel,
  TooFewObjects,
  NotSquare,
  AsymmetryExceedsTolerance,
  NonFiniteCell,
  ParseError,
  LabelAxisMismatch,
  LabelMismatch,
  AllFeaturesFiltered,
  EmptyIntersection,
  StrictMismatch,
  // solver / model
  DimensionMismatch,
  IterationLimitExceeded,
  DegenerateColumn,
  RetryLimitExceeded,
  // statistics / generalization model
  ZeroVariance,
  LengthMismatch,
  TooFewPoints,
  NoActiveFeatures,
  ZeroSizeActiveFeature,
  TooFewDatasets,
  NegativeDistance,
  InconsistentExamples,
  UnknownObject,
  // everything else
  InvalidArgument,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;
ErrorKind kind_of(ErrorCode code) noexcept;

/// Position inside an input file. Rows and columns are 1-based; 0 means "not applicable".
struct SourceLocation {
  std::string file;
  std::size_t row = 0;
  std::size_t column = 0;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  Error(ErrorCode code, const std::string& message, SourceLocation where);

  ErrorCode code() const noexcept { return code_; }
  ErrorKind kind() const noexcept { return kind_of(code_); }
  const std::optional<SourceLocation>& location() const noexcept { return location_; }
  /// Message without the code and location prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::optional<SourceLocation> location_;
};

}  // namespace size_lens
