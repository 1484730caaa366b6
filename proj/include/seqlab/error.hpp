#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace seqlab {

enum class ErrorCode {
  MalformedLabel,
  PrefixNotInScheme,
  RaggedRow,
  EmptyInput,
  LengthMismatch,
  MalformedJson,
  SpanOutOfBounds,
  OverlappingSpans,
  WordNotInText,
  InvalidUtf8,
  InvalidDocument,
  UnresolvableSource,
  FractionOutOfRange,
  InvalidConfig,
  AllOutside,
  InconsistentSource,
  MisalignedEntity,
  OverlapWithinList,
  MissingGold,
  TaggerLengthMismatch,
  EmptyText,
  Stopped,
  NonFiniteLoss,
  UnknownPreset,
  EmptyRunSet,
  MissingMetric,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedLabel: return "MalformedLabel";
    case ErrorCode::PrefixNotInScheme: return "PrefixNotInScheme";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::SpanOutOfBounds: return "SpanOutOfBounds";
    case ErrorCode::OverlappingSpans: return "OverlappingSpans";
    case ErrorCode::WordNotInText: return "WordNotInText";
    case ErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::UnresolvableSource: return "UnresolvableSource";
    case ErrorCode::FractionOutOfRange: return "FractionOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::AllOutside: return "AllOutside";
    case ErrorCode::InconsistentSource: return "InconsistentSource";
    case ErrorCode::MisalignedEntity: return "MisalignedEntity";
    case ErrorCode::OverlapWithinList: return "OverlapWithinList";
    case ErrorCode::MissingGold: return "MissingGold";
    case ErrorCode::TaggerLengthMismatch: return "TaggerLengthMismatch";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::Stopped: return "Stopped";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::UnknownPreset: return "UnknownPreset";
    case ErrorCode::EmptyRunSet: return "EmptyRunSet";
    case ErrorCode::MissingMetric: return "MissingMetric";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure in the library is reported as an Error carrying a code and,
/// for parsers, the 1-based input line it refers to.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::optional<std::size_t> line = std::nullopt)
      : std::runtime_error(format(code, message, line)),
        code_(code),
        line_(line),
        detail_(message) {}

  ErrorCode code() const noexcept { return code_; }
  std::optional<std::size_t> line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

  Error at_line(std::size_t line) const { return Error(code_, detail_, line); }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            std::optional<std::size_t> line) {
    std::string out(to_string(code));
    if (line) out += " at line " + std::to_string(*line);
    if (!message.empty()) out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string detail_;
};

}  // namespace seqlab
