#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "revstream/error.hpp"
#include "revstream/token.hpp"

namespace revstream {

enum class ConstraintBackend { position_list, substring_index };

/// Tokens that may legally extend the current partial scope, plus whether the
/// scope may be closed here. Closure is allowed for any non-empty scope, even
/// one whose match set has no continuation (a span ending at the buffer end).
struct ValidSet {
  std::vector<Token> continuations;  // sorted, unique
  bool closure_allowed = false;

  bool contains(const Token& t) const {
    return std::binary_search(continuations.begin(), continuations.end(), t);
  }
};

/// Feasible match end positions of the current partial scope. Ends are
/// exclusive: buffer[j - span_len, j) equals the partial scope for every j.
struct MatchSet {
  std::size_t buffer_len = 0;
  std::vector<std::size_t> ends;  // ascending
  std::size_t span_len = 0;
};

/// A finalized scope and its target window, resolved to the right-most
/// feasible occurrence.
struct LocalizedSpan {
  std::vector<Token> scope;
  std::size_t window_begin = 0;
  std::size_t window_end = 0;  // exclusive
};

namespace detail {

struct Interner {
  std::vector<Token> by_id;
  std::unordered_map<Token, std::int32_t> ids;

  std::int32_t intern(const Token& t) {
    auto it = ids.find(t);
    if (it != ids.end()) return it->second;
    const auto id = static_cast<std::int32_t>(by_id.size());
    by_id.push_back(t);
    ids.emplace(t, id);
    return id;
  }

  const std::int32_t* find(const Token& t) const {
    auto it = ids.find(t);
    return it == ids.end() ? nullptr : &it->second;
  }
};

/// Suffix automaton over interned tokens, built online. Walking a string from
/// the root lands on the state of its substring class; the class's transition
/// keys are exactly the valid continuations and max_end gives the right-most
/// occurrence in O(1).
class SuffixAutomaton {
 public:
  explicit SuffixAutomaton(std::span<const std::int32_t> seq) {
    states_.reserve(2 * seq.size() + 2);
    own_pos_.reserve(2 * seq.size() + 2);
    new_state(0, -1);
    std::int32_t last = 0;
    for (std::size_t i = 0; i < seq.size(); ++i)
      last = extend(last, seq[i], static_cast<std::int64_t>(i));
    finalize();
  }

  std::int32_t step(std::int32_t state, std::int32_t symbol) const {
    const auto& next = states_[static_cast<std::size_t>(state)].next;
    auto it = next.find(symbol);
    return it == next.end() ? -1 : it->second;
  }

  const std::unordered_map<std::int32_t, std::int32_t>& transitions(std::int32_t state) const {
    return states_[static_cast<std::size_t>(state)].next;
  }

  /// Inclusive index of the last token of the right-most occurrence.
  std::int64_t max_end(std::int32_t state) const {
    return states_[static_cast<std::size_t>(state)].max_pos;
  }

  /// All occurrence end positions (inclusive) of the state's class, ascending.
  std::vector<std::int64_t> occurrence_ends(std::int32_t state) const {
    std::vector<std::int64_t> out;
    std::vector<std::int32_t> stack = {state};
    while (!stack.empty()) {
      const std::int32_t v = stack.back();
      stack.pop_back();
      if (own_pos_[static_cast<std::size_t>(v)] >= 0)
        out.push_back(own_pos_[static_cast<std::size_t>(v)]);
      for (std::int32_t c : link_children_[static_cast<std::size_t>(v)]) stack.push_back(c);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

 private:
  struct State {
    std::int32_t link = -1;
    std::int32_t len = 0;
    std::int64_t max_pos = -1;
    std::unordered_map<std::int32_t, std::int32_t> next;
  };

  std::int32_t new_state(std::int32_t len, std::int64_t own_pos) {
    State s;
    s.len = len;
    states_.push_back(std::move(s));
    own_pos_.push_back(own_pos);
    return static_cast<std::int32_t>(states_.size() - 1);
  }

  std::int32_t extend(std::int32_t last, std::int32_t c, std::int64_t pos) {
    const std::int32_t cur = new_state(states_[static_cast<std::size_t>(last)].len + 1, pos);
    std::int32_t p = last;
    while (p != -1 && !states_[static_cast<std::size_t>(p)].next.count(c)) {
      states_[static_cast<std::size_t>(p)].next[c] = cur;
      p = states_[static_cast<std::size_t>(p)].link;
    }
    if (p == -1) {
      states_[static_cast<std::size_t>(cur)].link = 0;
      return cur;
    }
    const std::int32_t q = states_[static_cast<std::size_t>(p)].next[c];
    if (states_[static_cast<std::size_t>(p)].len + 1 == states_[static_cast<std::size_t>(q)].len) {
      states_[static_cast<std::size_t>(cur)].link = q;
      return cur;
    }
    const std::int32_t clone = new_state(states_[static_cast<std::size_t>(p)].len + 1, -1);
    states_[static_cast<std::size_t>(clone)].next = states_[static_cast<std::size_t>(q)].next;
    states_[static_cast<std::size_t>(clone)].link = states_[static_cast<std::size_t>(q)].link;
    while (p != -1) {
      auto& next = states_[static_cast<std::size_t>(p)].next;
      auto it = next.find(c);
      if (it == next.end() || it->second != q) break;
      it->second = clone;
      p = states_[static_cast<std::size_t>(p)].link;
    }
    states_[static_cast<std::size_t>(q)].link = clone;
    states_[static_cast<std::size_t>(cur)].link = clone;
    return cur;
  }

  void finalize() {
    const std::size_t n = states_.size();
    for (std::size_t v = 0; v < n; ++v) states_[v].max_pos = own_pos_[v];

    // order by len descending (counting sort) and push max_pos up the links
    std::int32_t max_len = 0;
    for (const State& s : states_) max_len = std::max(max_len, s.len);
    std::vector<std::size_t> bucket(static_cast<std::size_t>(max_len) + 2, 0);
    for (const State& s : states_) ++bucket[static_cast<std::size_t>(s.len)];
    for (std::size_t i = 1; i < bucket.size(); ++i) bucket[i] += bucket[i - 1];
    std::vector<std::int32_t> order(n);
    for (std::size_t v = n; v-- > 0;)
      order[--bucket[static_cast<std::size_t>(states_[v].len)]] = static_cast<std::int32_t>(v);

    for (std::size_t i = n; i-- > 0;) {
      const std::int32_t v = order[i];
      const std::int32_t link = states_[static_cast<std::size_t>(v)].link;
      if (link >= 0)
        states_[static_cast<std::size_t>(link)].max_pos =
            std::max(states_[static_cast<std::size_t>(link)].max_pos,
                     states_[static_cast<std::size_t>(v)].max_pos);
    }

    link_children_.assign(n, {});
    for (std::size_t v = 1; v < n; ++v)
      link_children_[static_cast<std::size_t>(states_[v].link)].push_back(
          static_cast<std::int32_t>(v));
  }

  std::vector<State> states_;
  std::vector<std::int64_t> own_pos_;  // position that created the state, -1 for clones
  std::vector<std::vector<std::int32_t>> link_children_;
};

struct ConstraintIndex {
  std::vector<Token> buffer;
  Interner interner;
  std::vector<std::int32_t> ids;
  std::unique_ptr<SuffixAutomaton> automaton;  // substring_index only
};

}  // namespace detail

/// Value-semantic view of an in-progress localization. `advance` returns a
/// new state; copies are cheap because the buffer and its index are shared.
class ConstraintState {
 public:
  std::size_t span_len() const { return span_len_; }
  std::size_t buffer_len() const { return index_->buffer.size(); }
  const std::vector<Token>& buffer() const { return index_->buffer; }
  ConstraintBackend backend() const { return backend_; }

  ValidSet valid_set() const {
    ValidSet v;
    v.closure_allowed = span_len_ >= 1;
    if (span_len_ == 0) {
      v.continuations = index_->interner.by_id;
      std::sort(v.continuations.begin(), v.continuations.end());
      return v;
    }
    if (backend_ == ConstraintBackend::position_list) {
      const std::size_t n = buffer_len();
      for (std::size_t j : ends_)
        if (j < n) v.continuations.push_back(index_->buffer[j]);
      std::sort(v.continuations.begin(), v.continuations.end());
      v.continuations.erase(std::unique(v.continuations.begin(), v.continuations.end()),
                            v.continuations.end());
      return v;
    }
    for (const auto& [sym, _] : index_->automaton->transitions(sa_state_))
      v.continuations.push_back(index_->interner.by_id[static_cast<std::size_t>(sym)]);
    std::sort(v.continuations.begin(), v.continuations.end());
    return v;
  }

  bool accepts(const Token& t) const {
    const std::int32_t* id = index_->interner.find(t);
    if (!id) return false;
    if (span_len_ == 0) return true;  // every buffer token starts some match
    if (backend_ == ConstraintBackend::position_list) {
      const std::size_t n = buffer_len();
      for (std::size_t j : ends_)
        if (j < n && index_->ids[j] == *id) return true;
      return false;
    }
    return index_->automaton->step(sa_state_, *id) != -1;
  }

  ConstraintState advance(const Token& t) const {
    const std::int32_t* id = index_->interner.find(t);
    if (!id)
      throw Error(ErrorKind::invalid_continuation, "token does not continue any match: " + t);
    ConstraintState next = *this;
    next.span_len_ = span_len_ + 1;
    if (backend_ == ConstraintBackend::position_list) {
      next.ends_.clear();
      if (span_len_ == 0) {
        for (std::size_t i = 0; i < index_->ids.size(); ++i)
          if (index_->ids[i] == *id) next.ends_.push_back(i + 1);
      } else {
        const std::size_t n = buffer_len();
        for (std::size_t j : ends_)
          if (j < n && index_->ids[j] == *id) next.ends_.push_back(j + 1);
      }
      if (next.ends_.empty())
        throw Error(ErrorKind::invalid_continuation, "token does not continue any match: " + t);
      return next;
    }
    const std::int32_t to = index_->automaton->step(sa_state_, *id);
    if (to == -1)
      throw Error(ErrorKind::invalid_continuation, "token does not continue any match: " + t);
    next.sa_state_ = to;
    return next;
  }

  LocalizedSpan close() const {
    if (span_len_ == 0) throw Error(ErrorKind::empty_span, "cannot close an empty scope");
    std::size_t j;
    if (backend_ == ConstraintBackend::position_list) {
      j = ends_.back();
    } else {
      j = static_cast<std::size_t>(index_->automaton->max_end(sa_state_)) + 1;
    }
    LocalizedSpan out;
    out.window_begin = j - span_len_;
    out.window_end = j;
    out.scope.assign(index_->buffer.begin() + static_cast<std::ptrdiff_t>(out.window_begin),
                     index_->buffer.begin() + static_cast<std::ptrdiff_t>(j));
    return out;
  }

  MatchSet match_set() const {
    MatchSet m;
    m.buffer_len = buffer_len();
    m.span_len = span_len_;
    if (span_len_ == 0) {
      m.ends.resize(m.buffer_len);
      for (std::size_t i = 0; i < m.buffer_len; ++i) m.ends[i] = i;
      return m;
    }
    if (backend_ == ConstraintBackend::position_list) {
      m.ends.assign(ends_.begin(), ends_.end());
      return m;
    }
    for (std::int64_t e : index_->automaton->occurrence_ends(sa_state_))
      m.ends.push_back(static_cast<std::size_t>(e) + 1);
    return m;
  }

 private:
  friend ConstraintState open_constraint(std::vector<Token>, ConstraintBackend);

  std::shared_ptr<const detail::ConstraintIndex> index_;
  ConstraintBackend backend_ = ConstraintBackend::position_list;
  std::size_t span_len_ = 0;
  std::vector<std::size_t> ends_;  // position_list: exclusive ends, ascending
  std::int32_t sa_state_ = 0;      // substring_index: automaton state of the partial scope
};

/// Opens a localization over a snapshot of the buffer. The initial valid set
/// is every distinct buffer token; closure is not yet allowed.
inline ConstraintState open_constraint(std::vector<Token> buffer,
                                       ConstraintBackend backend = ConstraintBackend::position_list) {
  if (buffer.empty())
    throw Error(ErrorKind::empty_buffer, "a revision cannot target an empty buffer");
  auto index = std::make_shared<detail::ConstraintIndex>();
  index->buffer = std::move(buffer);
  index->ids.reserve(index->buffer.size());
  for (const Token& t : index->buffer) index->ids.push_back(index->interner.intern(t));
  if (backend == ConstraintBackend::substring_index)
    index->automaton = std::make_unique<detail::SuffixAutomaton>(index->ids);
  ConstraintState st;
  st.index_ = std::move(index);
  st.backend_ = backend;
  return st;
}

/// Independent oracle: enumerates occurrences of `partial` by naive scan and
/// collects the token after each one. Shares nothing with the incremental
/// engine above.
inline ValidSet brute_force_valid_set(std::span<const Token> buffer,
                                      std::span<const Token> partial) {
  ValidSet v;
  v.closure_allowed = !partial.empty();
  bool found = partial.empty();
  for (std::size_t start = 0; start + partial.size() <= buffer.size(); ++start) {
    bool match = true;
    for (std::size_t k = 0; k < partial.size(); ++k)
      if (buffer[start + k] != partial[k]) {
        match = false;
        break;
      }
    if (!match) continue;
    found = true;
    const std::size_t next = start + partial.size();
    if (next < buffer.size()) v.continuations.push_back(buffer[next]);
  }
  if (!found) throw Error(ErrorKind::not_a_substring, "partial scope not found in buffer");
  std::sort(v.continuations.begin(), v.continuations.end());
  v.continuations.erase(std::unique(v.continuations.begin(), v.continuations.end()),
                        v.continuations.end());
  return v;
}

/// Exclusive end index of the right-most occurrence, by naive backward scan.
inline std::optional<std::size_t> rightmost_occurrence_end(std::span<const Token> buffer,
                                                           std::span<const Token> needle) {
  if (needle.empty() || needle.size() > buffer.size()) return std::nullopt;
  for (std::size_t start = buffer.size() - needle.size() + 1; start-- > 0;) {
    bool match = true;
    for (std::size_t k = 0; k < needle.size(); ++k)
      if (buffer[start + k] != needle[k]) {
        match = false;
        break;
      }
    if (match) return start + needle.size();
  }
  return std::nullopt;
}

}  // namespace revstream
