#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace traitlens {

enum class ErrorCode {
  EmptyDocument,
  PatternInvalid,
  SpanOutOfRange,
  SchemaError,
  OffsetError,
  TreeError,
  RangeError,
  SelfMerge,
  CycleError,
  UnknownCluster,
  UnknownCharacter,
  LexiconMissing,
  DimensionMismatch,
  ParseError,
  AllOutOfVocabulary,
  ZeroDocumentFrequency,
  NoRecords,
  UnsupportedCombination,
  InvalidArgument,
  NotReady,
  NotFound,
  VersionUnsupported,
  CorruptFile,
  IoError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library. `location` is a free-form pointer
// into the offending input (json path, line number, cluster id).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string location = {})
      : std::runtime_error(message), code_(code), location_(std::move(location)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& location() const noexcept { return location_; }

 private:
  ErrorCode code_;
  std::string location_;
};

}  // namespace traitlens
