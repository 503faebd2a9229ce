#include "blobgraph/common/error.hpp"

namespace blobgraph {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownRel: return "UnknownRel";
    case ErrorCode::UnknownBlob: return "UnknownBlob";
    case ErrorCode::RangeOutOfBounds: return "RangeOutOfBounds";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DuplicateSerial: return "DuplicateSerial";
    case ErrorCode::NoExtractor: return "NoExtractor";
    case ErrorCode::ExtractorFailed: return "ExtractorFailed";
    case ErrorCode::KindMismatch: return "KindMismatch";
    case ErrorCode::UnsupportedSymbol: return "UnsupportedSymbol";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportClosed: return "TransportClosed";
    case ErrorCode::DimMismatch: return "DimMismatch";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::DuplicateId: return "DuplicateId";
    case ErrorCode::StaleIndex: return "StaleIndex";
    case ErrorCode::LexError: return "LexError";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::ZeroRows: return "ZeroRows";
    case ErrorCode::Unsatisfiable: return "Unsatisfiable";
    case ErrorCode::SourceUnavailable: return "SourceUnavailable";
    case ErrorCode::EvaluationError: return "EvaluationError";
    case ErrorCode::NoLeader: return "NoLeader";
    case ErrorCode::ReplicaUnavailable: return "ReplicaUnavailable";
    case ErrorCode::ChecksumMismatch: return "ChecksumMismatch";
    case ErrorCode::DivergentLog: return "DivergentLog";
    case ErrorCode::CorruptFile: return "CorruptFile";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

}  // namespace blobgraph
