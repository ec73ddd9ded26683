#include "iplc/error.hpp"

#include <array>
#include <utility>

namespace iplc {
namespace {

constexpr std::array<std::pair<ErrorCode, std::string_view>, 36> kNames{{
    {ErrorCode::UnboundDimension, "UnboundDimension"},
    {ErrorCode::ConflictingTags, "ConflictingTags"},
    {ErrorCode::TagKindMismatch, "TagKindMismatch"},
    {ErrorCode::InvalidDimension, "InvalidDimension"},
    {ErrorCode::SyntaxError, "SyntaxError"},
    {ErrorCode::MalformedGeer, "MalformedGeer"},
    {ErrorCode::VersionMismatch, "VersionMismatch"},
    {ErrorCode::HashMismatch, "HashMismatch"},
    {ErrorCode::LexError, "LexError"},
    {ErrorCode::ParseError, "ParseError"},
    {ErrorCode::DuplicateDeclaration, "DuplicateDeclaration"},
    {ErrorCode::UnresolvedIdentifier, "UnresolvedIdentifier"},
    {ErrorCode::NotABoolean, "NotABoolean"},
    {ErrorCode::ArityMismatch, "ArityMismatch"},
    {ErrorCode::TypeError, "TypeError"},
    {ErrorCode::NonDimensionAt, "NonDimensionAt"},
    {ErrorCode::EodArith, "EodArith"},
    {ErrorCode::DivisionByZero, "DivisionByZero"},
    {ErrorCode::CyclicDemand, "CyclicDemand"},
    {ErrorCode::DepthExceeded, "DepthExceeded"},
    {ErrorCode::DuplicateProcedure, "DuplicateProcedure"},
    {ErrorCode::UnknownProcedure, "UnknownProcedure"},
    {ErrorCode::ProcedureFailed, "ProcedureFailed"},
    {ErrorCode::DuplicateNode, "DuplicateNode"},
    {ErrorCode::Unreachable, "Unreachable"},
    {ErrorCode::UnknownNode, "UnknownNode"},
    {ErrorCode::SpawnFailed, "SpawnFailed"},
    {ErrorCode::ProgramUnavailable, "ProgramUnavailable"},
    {ErrorCode::Timeout, "Timeout"},
    {ErrorCode::StoreUnavailable, "StoreUnavailable"},
    {ErrorCode::ConflictingResult, "ConflictingResult"},
    {ErrorCode::NotFound, "NotFound"},
    {ErrorCode::ProtocolError, "ProtocolError"},
    {ErrorCode::Stopped, "Stopped"},
    {ErrorCode::IoError, "IoError"},
    {ErrorCode::UsageError, "UsageError"},
}};

}  // namespace

std::string_view errorName(ErrorCode code) noexcept {
  for (const auto& [c, n] : kNames) {
    if (c == code) return n;
  }
  return "Unknown";
}

bool errorFromName(std::string_view name, ErrorCode& out) noexcept {
  for (const auto& [c, n] : kNames) {
    if (n == name) {
      out = c;
      return true;
    }
  }
  return false;
}

}  // namespace iplc
