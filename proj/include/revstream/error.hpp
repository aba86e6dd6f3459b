#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace revstream {

enum class ErrorKind {
  unterminated_episode,
  nested_episode,
  sentinel_out_of_context,
  empty_scope,
  empty_buffer,
  invalid_continuation,
  empty_span,
  not_a_substring,
  scope_not_found,
  identical_pair,
  scope_ambiguity_unresolvable,
  invalid_script,
  policy_exhausted,
  dimension_mismatch,
  empty_description,
  invalid_weights,
  external_checker_unavailable,
  io_error,
};

inline const char* error_kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::unterminated_episode: return "UnterminatedEpisode";
    case ErrorKind::nested_episode: return "NestedEpisode";
    case ErrorKind::sentinel_out_of_context: return "SentinelOutOfContext";
    case ErrorKind::empty_scope: return "EmptyScope";
    case ErrorKind::empty_buffer: return "EmptyBuffer";
    case ErrorKind::invalid_continuation: return "InvalidContinuation";
    case ErrorKind::empty_span: return "EmptySpan";
    case ErrorKind::not_a_substring: return "NotASubstring";
    case ErrorKind::scope_not_found: return "ScopeNotFound";
    case ErrorKind::identical_pair: return "IdenticalPair";
    case ErrorKind::scope_ambiguity_unresolvable: return "ScopeAmbiguityUnresolvable";
    case ErrorKind::invalid_script: return "InvalidScript";
    case ErrorKind::policy_exhausted: return "PolicyExhausted";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::empty_description: return "EmptyDescription";
    case ErrorKind::invalid_weights: return "InvalidWeights";
    case ErrorKind::external_checker_unavailable: return "ExternalCheckerUnavailable";
    case ErrorKind::io_error: return "IoError";
  }
  return "Unknown";
}

/// Library-wide exception. `token_index` is set when the failure is tied to a
/// position in a token stream.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> token_index = std::nullopt)
      : std::runtime_error(build_what(kind, message, token_index)),
        kind_(kind),
        token_index_(token_index) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> token_index() const noexcept { return token_index_; }

 private:
  static std::string build_what(ErrorKind kind, const std::string& message,
                                std::optional<std::size_t> idx) {
    std::string s = error_kind_name(kind);
    if (idx) {
      s += " at token ";
      s += std::to_string(*idx);
    }
    if (!message.empty()) {
      s += ": ";
      s += message;
    }
    return s;
  }

  ErrorKind kind_;
  std::optional<std::size_t> token_index_;
};

}  // namespace revstream
