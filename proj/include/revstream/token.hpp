#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "revstream/error.hpp"

namespace revstream {

/// Opaque text atom. The engine never interprets token contents; a token is
/// whatever the active tokenizer profile produced.
using Token = std::string;

enum class TokenizerProfile { character, word };

inline bool is_whitespace_byte(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

/// character: one token per byte. word: maximal runs of non-whitespace and
/// whitespace alternate, so concatenating the tokens reproduces the input
/// byte for byte under both profiles.
inline std::vector<Token> tokenize(std::string_view text, TokenizerProfile profile) {
  std::vector<Token> out;
  if (profile == TokenizerProfile::character) {
    out.reserve(text.size());
    for (char c : text) out.emplace_back(1, c);
    return out;
  }
  std::size_t i = 0;
  while (i < text.size()) {
    const bool ws = is_whitespace_byte(text[i]);
    std::size_t j = i + 1;
    while (j < text.size() && is_whitespace_byte(text[j]) == ws) ++j;
    out.emplace_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string detokenize(std::span<const Token> tokens) {
  std::size_t total = 0;
  for (const Token& t : tokens) total += t.size();
  std::string out;
  out.reserve(total);
  for (const Token& t : tokens) out += t;
  return out;
}

inline const char* profile_name(TokenizerProfile p) {
  return p == TokenizerProfile::character ? "char" : "word";
}

inline TokenizerProfile profile_from_name(std::string_view name) {
  if (name == "char" || name == "character") return TokenizerProfile::character;
  if (name == "word") return TokenizerProfile::word;
  throw Error(ErrorKind::io_error, "unknown tokenizer profile: " + std::string(name));
}

}  // namespace revstream
