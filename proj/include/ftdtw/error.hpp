#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ftdtw {

enum class ErrorCode {
  // configuration / usage
  InvalidConfig,
  ROutOfRange,
  DimensionOutOfRange,
  InstanceTooLarge,
  CapExceedsClassSize,
  // data
  EmptyDataset,
  EmptySequence,
  DimensionMismatch,
  NonFiniteValue,
  DuplicateId,
  BandInfeasible,
  LengthMismatch,
  UnknownSegment,
  MalformedLine,
  WrongDimension,
  EmptyBlock,
  BlockCountMismatch,
  UnlabeledSegment,
  // files
  Io,
  MissingFile,
  FormatVersionMismatch,
  ChecksumMismatch,
  BadFormat,
};

enum class ErrorCategory { Config, Data, Io };

std::string_view to_string(ErrorCode code);
ErrorCategory category_of(ErrorCode code);

/// Base exception for everything the library reports. The code identifies
/// the failure kind; the message carries ids, line numbers and the like.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  ErrorCategory category() const noexcept { return category_of(code_); }
  /// The message without the code prefix that what() carries.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

struct Violation {
  ErrorCode code;
  std::string segment_id;
  std::string detail;
};

/// Raised by dataset validation; carries every violation found, not just the first.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace ftdtw
