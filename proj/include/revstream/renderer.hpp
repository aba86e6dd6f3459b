#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revstream/constraint.hpp"
#include "revstream/episode.hpp"
#include "revstream/error.hpp"
#include "revstream/token.hpp"

namespace revstream {

enum class RenderMode { strict, lenient };

inline RenderMode render_mode_from_name(std::string_view name) {
  if (name == "strict") return RenderMode::strict;
  if (name == "lenient") return RenderMode::lenient;
  throw Error(ErrorKind::io_error, "unknown mode: " + std::string(name));
}

/// transparent: code tokens append to the buffer. The remaining phases cover
/// an episode in flight; the buffer is never touched between the trigger and
/// the commit on patch-close.
enum class RenderPhase { transparent, expect_scope_open, in_scope, expect_patch_open, in_patch };

struct RenderEvent {
  enum class Kind { append, revision_applied, revision_discarded };
  Kind kind = Kind::append;
  std::size_t token_index = 0;  // stream position that produced the event
  Token token;                  // append only
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  // revision_applied: window in the pre-splice buffer
  std::vector<Token> old_span;
  std::vector<Token> new_span;
  ErrorKind reason = ErrorKind::unterminated_episode;  // revision_discarded only
};

struct SpliceOutcome {
  std::size_t window_begin = 0;
  std::size_t window_end = 0;
};

/// Replaces the right-most occurrence of `scope` in `buffer` with `patch`.
/// All-or-nothing: the buffer is untouched if the scope does not occur.
/// Window resolution goes through the localization machinery, so this can
/// never disagree with the mask engine about the target.
inline SpliceOutcome apply_revision(std::vector<Token>& buffer, std::span<const Token> scope,
                                    std::span<const Token> patch,
                                    ConstraintBackend backend = ConstraintBackend::position_list) {
  if (scope.empty()) throw Error(ErrorKind::empty_span, "cannot apply an empty scope");
  if (buffer.empty()) throw Error(ErrorKind::scope_not_found, "buffer is empty");
  ConstraintState state = open_constraint(buffer, backend);
  try {
    for (const Token& t : scope) state = state.advance(t);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_continuation)
      throw Error(ErrorKind::scope_not_found, "scope is not a substring of the buffer");
    throw;
  }
  const LocalizedSpan loc = state.close();
  buffer.erase(buffer.begin() + static_cast<std::ptrdiff_t>(loc.window_begin),
               buffer.begin() + static_cast<std::ptrdiff_t>(loc.window_end));
  buffer.insert(buffer.begin() + static_cast<std::ptrdiff_t>(loc.window_begin), patch.begin(),
                patch.end());
  return {loc.window_begin, loc.window_end};
}

/// Stream interpreter. Code tokens pass through to the visible buffer; an
/// episode is buffered invisibly and spliced in atomically when its
/// patch-close arrives. Strict mode throws on malformed input, lenient mode
/// discards the broken episode (with an event) and keeps going.
class StreamRenderer {
 public:
  explicit StreamRenderer(SentinelSet sentinels = {}, RenderMode mode = RenderMode::strict,
                          ConstraintBackend backend = ConstraintBackend::position_list)
      : sentinels_(std::move(sentinels)), mode_(mode), backend_(backend) {}

  void feed(const Token& tok) {
    const std::size_t idx = consumed_++;
    const SentinelKind k = sentinels_.classify(tok);
    switch (phase_) {
      case RenderPhase::transparent:
        if (k == SentinelKind::none) {
          buffer_.push_back(tok);
          ++code_tokens_;
          RenderEvent ev;
          ev.kind = RenderEvent::Kind::append;
          ev.token_index = idx;
          ev.token = tok;
          events_.push_back(std::move(ev));
        } else if (k == SentinelKind::trigger) {
          phase_ = RenderPhase::expect_scope_open;
        } else {
          reject(ErrorKind::sentinel_out_of_context, "unexpected " + tok, idx);
        }
        break;
      case RenderPhase::expect_scope_open:
        if (k == SentinelKind::scope_open)
          phase_ = RenderPhase::in_scope;
        else if (k == SentinelKind::trigger)
          reject(ErrorKind::nested_episode, "trigger inside an episode", idx);
        else
          reject(ErrorKind::sentinel_out_of_context, "expected scope-open after trigger", idx);
        break;
      case RenderPhase::in_scope:
        if (k == SentinelKind::none) {
          pending_scope_.push_back(tok);
        } else if (k == SentinelKind::scope_close) {
          if (pending_scope_.empty())
            reject(ErrorKind::empty_scope, "scope closed with no content", idx);
          else
            phase_ = RenderPhase::expect_patch_open;
        } else if (k == SentinelKind::trigger || k == SentinelKind::scope_open) {
          reject(ErrorKind::nested_episode, "episode opened inside a scope", idx);
        } else {
          reject(ErrorKind::sentinel_out_of_context, "unexpected " + tok + " inside scope", idx);
        }
        break;
      case RenderPhase::expect_patch_open:
        if (k == SentinelKind::patch_open)
          phase_ = RenderPhase::in_patch;
        else if (k == SentinelKind::trigger)
          reject(ErrorKind::nested_episode, "trigger inside an episode", idx);
        else
          reject(ErrorKind::sentinel_out_of_context, "expected patch-open after scope", idx);
        break;
      case RenderPhase::in_patch:
        if (k == SentinelKind::none) {
          pending_patch_.push_back(tok);
        } else if (k == SentinelKind::patch_close) {
          commit(idx);
        } else if (k == SentinelKind::scope_close) {
          reject(ErrorKind::sentinel_out_of_context, "unexpected " + tok + " inside patch", idx);
        } else {
          reject(ErrorKind::nested_episode, "episode opened inside a patch", idx);
        }
        break;
    }
  }

  /// End of stream. A stream ending mid-episode is an error in strict mode
  /// and a discarded episode in lenient mode.
  void finish() {
    if (phase_ != RenderPhase::transparent)
      reject(ErrorKind::unterminated_episode, "stream ended mid-episode", consumed_);
  }

  const std::vector<Token>& buffer() const { return buffer_; }
  const std::vector<RenderEvent>& events() const { return events_; }
  RenderPhase phase() const { return phase_; }
  const std::vector<Token>& pending_scope() const { return pending_scope_; }
  const std::vector<Token>& pending_patch() const { return pending_patch_; }
  std::size_t tokens_consumed() const { return consumed_; }
  std::size_t code_tokens() const { return code_tokens_; }
  std::size_t revisions_applied() const { return revisions_; }

 private:
  void commit(std::size_t idx) {
    SpliceOutcome sp;
    try {
      sp = apply_revision(buffer_, pending_scope_, pending_patch_, backend_);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::scope_not_found) {
        reject(ErrorKind::scope_not_found, e.what(), idx);
        return;
      }
      throw;
    }
    RenderEvent ev;
    ev.kind = RenderEvent::Kind::revision_applied;
    ev.token_index = idx;
    ev.window_begin = sp.window_begin;
    ev.window_end = sp.window_end;
    ev.old_span = std::move(pending_scope_);
    ev.new_span = pending_patch_;
    events_.push_back(std::move(ev));
    ++revisions_;
    pending_scope_.clear();
    pending_patch_.clear();
    phase_ = RenderPhase::transparent;
  }

  void reject(ErrorKind kind, const std::string& msg, std::size_t idx) {
    if (mode_ == RenderMode::strict) throw Error(kind, msg, idx);
    RenderEvent ev;
    ev.kind = RenderEvent::Kind::revision_discarded;
    ev.token_index = idx;
    ev.reason = kind;
    events_.push_back(std::move(ev));
    pending_scope_.clear();
    pending_patch_.clear();
    phase_ = RenderPhase::transparent;
  }

  SentinelSet sentinels_;
  RenderMode mode_;
  ConstraintBackend backend_;
  RenderPhase phase_ = RenderPhase::transparent;
  std::vector<Token> buffer_;
  std::vector<Token> pending_scope_;
  std::vector<Token> pending_patch_;
  std::vector<RenderEvent> events_;
  std::size_t consumed_ = 0;
  std::size_t code_tokens_ = 0;
  std::size_t revisions_ = 0;
};

struct RenderResult {
  std::vector<Token> buffer;
  std::vector<RenderEvent> events;
};

/// Folds the whole stream through a renderer and returns the final buffer and
/// event log.
inline RenderResult render(std::span<const Token> stream, const SentinelSet& sentinels = {},
                           RenderMode mode = RenderMode::strict,
                           ConstraintBackend backend = ConstraintBackend::position_list) {
  StreamRenderer r(sentinels, mode, backend);
  for (const Token& t : stream) r.feed(t);
  r.finish();
  return {r.buffer(), r.events()};
}

/// Structural semantics: episodes of a parsed trajectory applied left to
/// right to the growing buffer. For well-formed streams this equals render().
inline std::vector<Token> apply_trajectory(const Trajectory& traj,
                                           ConstraintBackend backend = ConstraintBackend::position_list) {
  std::vector<Token> buf;
  for (const auto& item : traj.items) {
    if (const Token* t = std::get_if<Token>(&item)) {
      buf.push_back(*t);
      continue;
    }
    const auto& ep = std::get<RevisionEpisode>(item);
    apply_revision(buf, ep.scope, ep.patch, backend);
  }
  return buf;
}

}  // namespace revstream
