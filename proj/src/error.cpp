#include "traitlens/error.hpp"

namespace traitlens {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDocument: return "EmptyDocument";
    case ErrorCode::PatternInvalid: return "PatternInvalid";
    case ErrorCode::SpanOutOfRange: return "SpanOutOfRange";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::OffsetError: return "OffsetError";
    case ErrorCode::TreeError: return "TreeError";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::SelfMerge: return "SelfMerge";
    case ErrorCode::CycleError: return "CycleError";
    case ErrorCode::UnknownCluster: return "UnknownCluster";
    case ErrorCode::UnknownCharacter: return "UnknownCharacter";
    case ErrorCode::LexiconMissing: return "LexiconMissing";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AllOutOfVocabulary: return "AllOutOfVocabulary";
    case ErrorCode::ZeroDocumentFrequency: return "ZeroDocumentFrequency";
    case ErrorCode::NoRecords: return "NoRecords";
    case ErrorCode::UnsupportedCombination: return "UnsupportedCombination";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotReady: return "NotReady";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::VersionUnsupported: return "VersionUnsupported";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace traitlens
