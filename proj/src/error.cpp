#include "ftdtw/error.hpp"

namespace ftdtw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ROutOfRange: return "ROutOfRange";
    case ErrorCode::DimensionOutOfRange: return "DimensionOutOfRange";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
    case ErrorCode::CapExceedsClassSize: return "CapExceedsClassSize";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptySequence: return "EmptySequence";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFiniteValue: return "NonFiniteValue";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::BandInfeasible: return "BandInfeasible";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::UnknownSegment: return "UnknownSegment";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::WrongDimension: return "WrongDimension";
    case ErrorCode::EmptyBlock: return "EmptyBlock";
    case ErrorCode::BlockCountMismatch: return "BlockCountMismatch";
    case ErrorCode::UnlabeledSegment: return "UnlabeledSegment";
    case ErrorCode::Io: return "Io";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::BadFormat: return "BadFormat";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidConfig:
    case ErrorCode::ROutOfRange:
    case ErrorCode::DimensionOutOfRange:
    case ErrorCode::InstanceTooLarge:
    case ErrorCode::CapExceedsClassSize:
      return ErrorCategory::Config;
    case ErrorCode::Io:
    case ErrorCode::MissingFile:
    case ErrorCode::FormatVersionMismatch:
    case ErrorCode::ChecksumMismatch:
    case ErrorCode::BadFormat:
      return ErrorCategory::Io;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::string out = std::to_string(violations.size()) + " violation(s)";
  for (const auto& v : violations) {
    out += "\n  ";
    out += to_string(v.code);
    if (!v.segment_id.empty()) out += " [" + v.segment_id + "]";
    if (!v.detail.empty()) out += " " + v.detail;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::EmptyDataset : violations.front().code,
            summarize(violations)),
      violations_(std::move(violations)) {}

}  // namespace ftdtw
