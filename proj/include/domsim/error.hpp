#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace domsim {

enum class ErrorKind {
  EmptyCorpus,
  AllDocumentsFiltered,
  DimensionShrink,
  DimensionMismatch,
  ZeroVector,
  EmptyKnowledgeBase,
  KTooLarge,
  ConfigInvalid,
  FingerprintMismatch,
  IoFailure,
  FormatVersionMismatch,
  CorruptFile,
  ProtocolInfeasible,
  DuplicateLemma,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::AllDocumentsFiltered: return "AllDocumentsFiltered";
    case ErrorKind::DimensionShrink: return "DimensionShrink";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::EmptyKnowledgeBase: return "EmptyKnowledgeBase";
    case ErrorKind::KTooLarge: return "KTooLarge";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::FingerprintMismatch: return "FingerprintMismatch";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::FormatVersionMismatch: return "FormatVersionMismatch";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::ProtocolInfeasible: return "ProtocolInfeasible";
    case ErrorKind::DuplicateLemma: return "DuplicateLemma";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind; the
/// CLI serializes it as `{"error": {"kind": ..., "message": ...}}`.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace domsim
