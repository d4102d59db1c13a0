#include "size_lens/error.hpp"

namespace size_lens {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonBinaryCell: return "NonBinaryCell";
    case ErrorCode::DuplicateLabel: return "DuplicateLabel";
    case ErrorCode::TooFewObjects: return "TooFewObjects";
    case ErrorCode::NotSquare: return "NotSquare";
    case ErrorCode::AsymmetryExceedsTolerance: return "AsymmetryExceedsTolerance";
    case ErrorCode::NonFiniteCell: return "NonFiniteCell";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::LabelAxisMismatch: return "LabelAxisMismatch";
    case ErrorCode::LabelMismatch: return "LabelMismatch";
    case ErrorCode::AllFeaturesFiltered: return "AllFeaturesFiltered";
    case ErrorCode::EmptyIntersection: return "EmptyIntersection";
    case ErrorCode::StrictMismatch: return "StrictMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IterationLimitExceeded: return "IterationLimitExceeded";
    case ErrorCode::DegenerateColumn: return "DegenerateColumn";
    case ErrorCode::RetryLimitExceeded: return "RetryLimitExceeded";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::NoActiveFeatures: return "NoActiveFeatures";
    case ErrorCode::ZeroSizeActiveFeature: return "ZeroSizeActiveFeature";
    case ErrorCode::TooFewDatasets: return "TooFewDatasets";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::InconsistentExamples: return "InconsistentExamples";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

ErrorKind kind_of(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonBinaryCell:
    case ErrorCode::DuplicateLabel:
    case ErrorCode::TooFewObjects:
    case ErrorCode::NotSquare:
    case ErrorCode::AsymmetryExceedsTolerance:
    case ErrorCode::NonFiniteCell:
    case ErrorCode::ParseError:
    case ErrorCode::LabelAxisMismatch:
    case ErrorCode::LabelMismatch:
    case ErrorCode::AllFeaturesFiltered:
    case ErrorCode::EmptyIntersection:
    case ErrorCode::StrictMismatch:
      return ErrorKind::Ingest;
    case ErrorCode::DimensionMismatch:
    case ErrorCode::IterationLimitExceeded:
    case ErrorCode::DegenerateColumn:
    case ErrorCode::RetryLimitExceeded:
      return ErrorKind::Solver;
    case ErrorCode::ZeroVariance:
    case ErrorCode::LengthMismatch:
    case ErrorCode::TooFewPoints:
    case ErrorCode::NoActiveFeatures:
    case ErrorCode::ZeroSizeActiveFeature:
    case ErrorCode::TooFewDatasets:
    case ErrorCode::NegativeDistance:
    case ErrorCode::InconsistentExamples:
    case ErrorCode::UnknownObject:
      return ErrorKind::Statistics;
    case ErrorCode::IoError:
      return ErrorKind::Io;
    case ErrorCode::InvalidArgument:
      return ErrorKind::Usage;
  }
  return ErrorKind::Usage;
}

namespace {

std::string decorate(ErrorCode code, const std::string& message, const SourceLocation* where) {
  std::string out(to_string(code));
  out += ": ";
  if (where != nullptr) {
    out += where->file;
    if (where->row != 0) out += ":" + std::to_string(where->row);
    if (where->column != 0) out += ":" + std::to_string(where->column);
    out += ": ";
  }
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(decorate(code, message, nullptr)), code_(code), detail_(message) {}

Error::Error(ErrorCode code, const std::string& message, SourceLocation where)
    : std::runtime_error(decorate(code, message, &where)), code_(code), detail_(message), location_(std::move(where)) {}

}  // namespace size_lens
