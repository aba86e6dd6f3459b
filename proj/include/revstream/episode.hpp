#pragma once

#include <span>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "revstream/error.hpp"
#include "revstream/token.hpp"

namespace revstream {

enum class SentinelKind { none, trigger, scope_open, scope_close, patch_open, patch_close };

/// The five operational tokens. Canonical spellings are what serialize emits;
/// the <scope>/<patch> spellings are accepted on input and never produced.
struct SentinelSet {
  Token trigger = "<|backtracking|>";
  Token scope_open = "<|OLD|>";
  Token scope_close = "<|/OLD|>";
  Token patch_open = "<|NEW|>";
  Token patch_close = "<|/NEW|>";

  SentinelKind classify(std::string_view t) const {
    if (t == trigger) return SentinelKind::trigger;
    if (t == scope_open || t == "<scope>") return SentinelKind::scope_open;
    if (t == scope_close || t == "</scope>") return SentinelKind::scope_close;
    if (t == patch_open || t == "<patch>") return SentinelKind::patch_open;
    if (t == patch_close || t == "</patch>") return SentinelKind::patch_close;
    return SentinelKind::none;
  }

  bool is_sentinel(std::string_view t) const { return classify(t) != SentinelKind::none; }

  /// Every spelling the text reader recognizes, canonical first.
  std::vector<Token> spellings() const {
    return {trigger,    scope_open, scope_close, patch_open, patch_close,
            "<scope>", "</scope>", "<patch>",   "</patch>"};
  }
};

/// One in-stream edit: replace `scope` (a substring of the current buffer)
/// with `patch`. An empty patch deletes the scope; an empty scope is illegal.
struct RevisionEpisode {
  std::vector<Token> scope;
  std::vector<Token> patch;
  bool operator==(const RevisionEpisode&) const = default;
};

using TrajectoryItem = std::variant<Token, RevisionEpisode>;

struct Trajectory {
  std::vector<TrajectoryItem> items;
  bool operator==(const Trajectory&) const = default;

  std::size_t code_token_count() const {
    std::size_t n = 0;
    for (const auto& item : items)
      if (std::holds_alternative<Token>(item)) ++n;
    return n;
  }

  std::size_t episode_count() const { return items.size() - code_token_count(); }
};

/// Code tokens in emission order, episodes dropped.
inline std::vector<Token> code_projection(const Trajectory& traj) {
  std::vector<Token> out;
  out.reserve(traj.items.size());
  for (const auto& item : traj.items)
    if (const Token* t = std::get_if<Token>(&item)) out.push_back(*t);
  return out;
}

enum class ParseMode { strict, lenient };

inline ParseMode parse_mode_from_name(std::string_view name) {
  if (name == "strict") return ParseMode::strict;
  if (name == "lenient") return ParseMode::lenient;
  throw Error(ErrorKind::io_error, "unknown mode: " + std::string(name));
}

// ---------------------------------------------------------------------------
// serialize / parse
// ---------------------------------------------------------------------------

/// Expands a trajectory into the linear token stream: code tokens verbatim,
/// each episode as trigger, scope-open, scope, scope-close, patch-open,
/// patch, patch-close. Output length = #code + sum(|scope| + |patch| + 5).
inline std::vector<Token> serialize(const Trajectory& traj, const SentinelSet& sents = {}) {
  std::vector<Token> out;
  std::size_t len = 0;
  for (const auto& item : traj.items) {
    if (const RevisionEpisode* ep = std::get_if<RevisionEpisode>(&item))
      len += ep->scope.size() + ep->patch.size() + 5;
    else
      ++len;
  }
  out.reserve(len);
  for (const auto& item : traj.items) {
    if (const Token* t = std::get_if<Token>(&item)) {
      if (sents.is_sentinel(*t))
        throw Error(ErrorKind::sentinel_out_of_context, "code token equals a sentinel: " + *t);
      out.push_back(*t);
      continue;
    }
    const auto& ep = std::get<RevisionEpisode>(item);
    if (ep.scope.empty()) throw Error(ErrorKind::empty_scope, "episode scope is empty");
    for (const Token& t : ep.scope)
      if (sents.is_sentinel(t))
        throw Error(ErrorKind::sentinel_out_of_context, "scope contains a sentinel: " + t);
    for (const Token& t : ep.patch)
      if (sents.is_sentinel(t))
        throw Error(ErrorKind::sentinel_out_of_context, "patch contains a sentinel: " + t);
    out.push_back(sents.trigger);
    out.push_back(sents.scope_open);
    out.insert(out.end(), ep.scope.begin(), ep.scope.end());
    out.push_back(sents.scope_close);
    out.push_back(sents.patch_open);
    out.insert(out.end(), ep.patch.begin(), ep.patch.end());
    out.push_back(sents.patch_close);
  }
  return out;
}

/// Inverse of serialize on well-formed streams. Strict mode rejects every
/// grammar violation; lenient mode drops a trailing unterminated episode and
/// keeps everything parsed before it. Mid-stream violations are errors in
/// both modes.
inline Trajectory parse(std::span<const Token> stream, const SentinelSet& sents = {},
                        ParseMode mode = ParseMode::strict) {
  enum class St { top, expect_scope_open, in_scope, expect_patch_open, in_patch };
  Trajectory out;
  RevisionEpisode ep;
  St st = St::top;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    const Token& t = stream[i];
    const SentinelKind k = sents.classify(t);
    switch (st) {
      case St::top:
        if (k == SentinelKind::none) {
          out.items.emplace_back(t);
        } else if (k == SentinelKind::trigger) {
          ep = {};
          st = St::expect_scope_open;
        } else {
          throw Error(ErrorKind::sentinel_out_of_context, "unexpected " + t, i);
        }
        break;
      case St::expect_scope_open:
        if (k == SentinelKind::scope_open)
          st = St::in_scope;
        else if (k == SentinelKind::trigger)
          throw Error(ErrorKind::nested_episode, "trigger inside an episode", i);
        else
          throw Error(ErrorKind::sentinel_out_of_context,
                      "expected scope-open after trigger, got " + t, i);
        break;
      case St::in_scope:
        if (k == SentinelKind::none) {
          ep.scope.push_back(t);
        } else if (k == SentinelKind::scope_close) {
          if (ep.scope.empty()) throw Error(ErrorKind::empty_scope, "scope closed with no content", i);
          st = St::expect_patch_open;
        } else if (k == SentinelKind::trigger || k == SentinelKind::scope_open) {
          throw Error(ErrorKind::nested_episode, "episode opened inside a scope", i);
        } else {
          throw Error(ErrorKind::sentinel_out_of_context, "unexpected " + t + " inside scope", i);
        }
        break;
      case St::expect_patch_open:
        if (k == SentinelKind::patch_open)
          st = St::in_patch;
        else if (k == SentinelKind::trigger)
          throw Error(ErrorKind::nested_episode, "trigger inside an episode", i);
        else
          throw Error(ErrorKind::sentinel_out_of_context,
                      "expected patch-open after scope, got " + t, i);
        break;
      case St::in_patch:
        if (k == SentinelKind::none) {
          ep.patch.push_back(t);
        } else if (k == SentinelKind::patch_close) {
          out.items.emplace_back(std::move(ep));
          ep = {};
          st = St::top;
        } else if (k == SentinelKind::trigger || k == SentinelKind::scope_open ||
                   k == SentinelKind::patch_open) {
          throw Error(ErrorKind::nested_episode, "episode opened inside a patch", i);
        } else {
          throw Error(ErrorKind::sentinel_out_of_context, "unexpected " + t + " inside patch", i);
        }
        break;
    }
  }
  if (st != St::top && mode == ParseMode::strict)
    throw Error(ErrorKind::unterminated_episode, "stream ended mid-episode", stream.size());
  return out;
}

// ---------------------------------------------------------------------------
// trajectory text format
// ---------------------------------------------------------------------------

/// Tokens are concatenated; whitespace is carried by the tokens themselves
/// and sentinels appear verbatim.
inline std::string tokens_to_text(std::span<const Token> tokens) { return detokenize(tokens); }

/// Splits text around sentinel spellings and tokenizes the segments between
/// them. Text that spells a sentinel is always read as that sentinel, so code
/// must not contain the reserved spellings. The reader reproduces the
/// original token boundaries whenever the stream's code and span tokens were
/// produced by the same profile's tokenizer (true for everything this
/// library emits).
inline std::vector<Token> text_to_tokens(std::string_view text, const SentinelSet& sents,
                                         TokenizerProfile profile) {
  const std::vector<Token> spells = sents.spellings();
  std::vector<std::size_t> cached(spells.size(), 0);
  std::vector<bool> cache_valid(spells.size(), false);
  std::vector<Token> out;

  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t best = std::string_view::npos;
    std::size_t best_len = 0;
    for (std::size_t s = 0; s < spells.size(); ++s) {
      if (!cache_valid[s] || (cached[s] != std::string_view::npos && cached[s] < pos)) {
        cached[s] = text.find(spells[s], pos);
        cache_valid[s] = true;
      }
      const std::size_t f = cached[s];
      if (f == std::string_view::npos) continue;
      if (f < best || (f == best && spells[s].size() > best_len)) {
        best = f;
        best_len = spells[s].size();
      }
    }
    if (best == std::string_view::npos) {
      auto tail = tokenize(text.substr(pos), profile);
      out.insert(out.end(), tail.begin(), tail.end());
      break;
    }
    if (best > pos) {
      auto seg = tokenize(text.substr(pos, best - pos), profile);
      out.insert(out.end(), seg.begin(), seg.end());
    }
    out.emplace_back(text.substr(best, best_len));
    pos = best + best_len;
  }
  return out;
}

}  // namespace revstream
