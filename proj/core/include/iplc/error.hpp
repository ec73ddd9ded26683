#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace iplc {

/// Every failure the library reports carries one of these codes. The CLI
/// prints `errorName(code)` so scripts can match on a stable spelling.
enum class ErrorCode : std::uint8_t {
  // context-core
  UnboundDimension,
  ConflictingTags,
  TagKindMismatch,
  InvalidDimension,
  SyntaxError,
  // lang-core
  MalformedGeer,
  VersionMismatch,
  HashMismatch,
  // gipc
  LexError,
  ParseError,
  DuplicateDeclaration,
  UnresolvedIdentifier,
  // gee
  NotABoolean,
  ArityMismatch,
  TypeError,
  NonDimensionAt,
  EodArith,
  DivisionByZero,
  CyclicDemand,
  DepthExceeded,
  DuplicateProcedure,
  UnknownProcedure,
  ProcedureFailed,
  // tiers
  DuplicateNode,
  Unreachable,
  UnknownNode,
  SpawnFailed,
  ProgramUnavailable,
  Timeout,
  StoreUnavailable,
  ConflictingResult,
  NotFound,
  ProtocolError,
  Stopped,
  // plumbing
  IoError,
  UsageError,
};

std::string_view errorName(ErrorCode code) noexcept;

/// Parses a name produced by errorName; returns false for unknown spellings.
bool errorFromName(std::string_view name, ErrorCode& out) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view name() const noexcept { return errorName(code_); }

 private:
  ErrorCode code_;
};

}  // namespace iplc
