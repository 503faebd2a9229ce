#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace blobgraph {

enum class ErrorCode {
  // graph
  UnknownNode,
  UnknownRel,
  // blob store
  UnknownBlob,
  RangeOutOfBounds,
  InvalidConfig,
  IoError,
  // extraction
  DuplicateSerial,
  NoExtractor,
  ExtractorFailed,
  KindMismatch,
  UnsupportedSymbol,
  EmptySet,
  Timeout,
  TransportClosed,
  // semantic index
  DimMismatch,
  EmptySpace,
  DuplicateId,
  StaleIndex,
  // query language
  LexError,
  ParseError,
  UnboundVariable,
  // planner
  ZeroRows,
  Unsatisfiable,
  // executor
  SourceUnavailable,
  EvaluationError,
  // replication
  NoLeader,
  ReplicaUnavailable,
  ChecksumMismatch,
  DivergentLog,
  // snapshot / file formats
  CorruptFile,
  // ingestion
  InvalidInput,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace blobgraph
