#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

#include "revstream/error.hpp"
#include "revstream/token.hpp"

namespace revstream {

/// One contiguous edited region of the vulnerable token stream.
/// vulnerable[vul_begin, vul_end) == del_span, and replacing it with ins_span
/// reproduces the corresponding region of the patched stream.
struct DiffHunk {
  std::size_t vul_begin = 0;
  std::size_t vul_end = 0;
  std::vector<Token> del_span;
  std::vector<Token> ins_span;
};

namespace detail {

enum class EditOp : unsigned char { keep, del, ins };

// Beyond this many edit steps the O(ND) search is abandoned and the differing
// middle becomes one coarse hunk. Reconstruction stays exact either way.
inline constexpr std::int64_t kMyersEditCap = 2048;

inline void myers_core(std::span<const Token> a, std::span<const Token> b,
                       std::vector<EditOp>& out) {
  const auto n = static_cast<std::int64_t>(a.size());
  const auto m = static_cast<std::int64_t>(b.size());
  if (n == 0 || m == 0 || n + m > kMyersEditCap * 8) {
    // empty side, or too large to bother: coarse replacement
    if (n + m <= 0) return;
    if (n > 0 && m > 0 && n + m > kMyersEditCap * 8) {
      out.insert(out.end(), static_cast<std::size_t>(n), EditOp::del);
      out.insert(out.end(), static_cast<std::size_t>(m), EditOp::ins);
      return;
    }
    out.insert(out.end(), static_cast<std::size_t>(n), EditOp::del);
    out.insert(out.end(), static_cast<std::size_t>(m), EditOp::ins);
    return;
  }

  const std::int64_t max_d = std::min(n + m, kMyersEditCap);
  const std::int64_t off = max_d;
  std::vector<std::int64_t> v(static_cast<std::size_t>(2 * max_d + 1), 0);
  std::vector<std::vector<std::int64_t>> trace;  // banded snapshots, trace[d] covers k in [-d, d]
  std::int64_t found_d = -1;

  for (std::int64_t d = 0; d <= max_d && found_d < 0; ++d) {
    for (std::int64_t k = -d; k <= d; k += 2) {
      std::int64_t x;
      if (k == -d || (k != d && v[static_cast<std::size_t>(off + k - 1)] <
                                    v[static_cast<std::size_t>(off + k + 1)]))
        x = v[static_cast<std::size_t>(off + k + 1)];
      else
        x = v[static_cast<std::size_t>(off + k - 1)] + 1;
      std::int64_t y = x - k;
      while (x < n && y < m && a[static_cast<std::size_t>(x)] == b[static_cast<std::size_t>(y)]) {
        ++x;
        ++y;
      }
      v[static_cast<std::size_t>(off + k)] = x;
      if (x >= n && y >= m) {
        found_d = d;
        break;
      }
    }
    trace.emplace_back(v.begin() + static_cast<std::ptrdiff_t>(off - d),
                       v.begin() + static_cast<std::ptrdiff_t>(off + d + 1));
  }

  if (found_d < 0) {
    out.insert(out.end(), static_cast<std::size_t>(n), EditOp::del);
    out.insert(out.end(), static_cast<std::size_t>(m), EditOp::ins);
    return;
  }

  std::vector<EditOp> rev;
  rev.reserve(static_cast<std::size_t>(n + m));
  std::int64_t x = n;
  std::int64_t y = m;
  for (std::int64_t d = found_d; d >= 1; --d) {
    const std::vector<std::int64_t>& prev = trace[static_cast<std::size_t>(d - 1)];
    auto prev_at = [&](std::int64_t k) { return prev[static_cast<std::size_t>(k + (d - 1))]; };
    const std::int64_t k = x - y;
    std::int64_t prev_k;
    if (k == -d || (k != d && prev_at(k - 1) < prev_at(k + 1)))
      prev_k = k + 1;
    else
      prev_k = k - 1;
    const std::int64_t prev_x = prev_at(prev_k);
    const std::int64_t x_start = (prev_k == k + 1) ? prev_x : prev_x + 1;
    while (x > x_start) {
      rev.push_back(EditOp::keep);
      --x;
      --y;
    }
    if (prev_k == k + 1) {
      rev.push_back(EditOp::ins);
      --y;
    } else {
      rev.push_back(EditOp::del);
      --x;
    }
  }
  while (x > 0) {
    rev.push_back(EditOp::keep);
    --x;
    --y;
  }
  out.insert(out.end(), rev.rbegin(), rev.rend());
}

/// Myers greedy O(ND) edit script, with common prefix/suffix stripped first.
/// Replays `a` as `b`: keep consumes one token of both sides, del one of a,
/// ins one of b.
inline std::vector<EditOp> myers_edit_script(std::span<const Token> a, std::span<const Token> b) {
  std::size_t pre = 0;
  while (pre < a.size() && pre < b.size() && a[pre] == b[pre]) ++pre;
  std::size_t suf = 0;
  while (suf < a.size() - pre && suf < b.size() - pre &&
         a[a.size() - 1 - suf] == b[b.size() - 1 - suf])
    ++suf;

  std::vector<EditOp> script;
  script.reserve(a.size() + b.size());
  script.insert(script.end(), pre, EditOp::keep);
  myers_core(a.subspan(pre, a.size() - pre - suf), b.subspan(pre, b.size() - pre - suf), script);
  script.insert(script.end(), suf, EditOp::keep);
  return script;
}

}  // namespace detail

/// Contiguous hunks from an LCS alignment of the two token streams. Adjacent
/// hunks separated by fewer than `merge_gap` common tokens are merged (0 = no
/// merging). Pure insertions are anchored on a neighboring common token so
/// del_span is never empty; a pure insertion with no possible anchor means
/// the vulnerable side is empty and is an error.
inline std::vector<DiffHunk> diff_tokens(std::span<const Token> vul,
                                         std::span<const Token> patched,
                                         std::size_t merge_gap = 0) {
  const std::vector<detail::EditOp> script = detail::myers_edit_script(vul, patched);

  std::vector<DiffHunk> hunks;
  std::size_t ai = 0, bi = 0, i = 0;
  while (i < script.size()) {
    if (script[i] == detail::EditOp::keep) {
      ++ai;
      ++bi;
      ++i;
      continue;
    }
    DiffHunk h;
    h.vul_begin = ai;
    while (i < script.size() && script[i] != detail::EditOp::keep) {
      if (script[i] == detail::EditOp::del)
        h.del_span.push_back(vul[ai++]);
      else
        h.ins_span.push_back(patched[bi++]);
      ++i;
    }
    h.vul_end = ai;
    hunks.push_back(std::move(h));
  }

  if (merge_gap > 0 && hunks.size() > 1) {
    std::vector<DiffHunk> merged;
    merged.push_back(std::move(hunks.front()));
    for (std::size_t idx = 1; idx < hunks.size(); ++idx) {
      DiffHunk& prev = merged.back();
      DiffHunk& cur = hunks[idx];
      if (cur.vul_begin - prev.vul_end < merge_gap) {
        for (std::size_t j = prev.vul_end; j < cur.vul_begin; ++j) {
          prev.del_span.push_back(vul[j]);
          prev.ins_span.push_back(vul[j]);
        }
        prev.del_span.insert(prev.del_span.end(), cur.del_span.begin(), cur.del_span.end());
        prev.ins_span.insert(prev.ins_span.end(), cur.ins_span.begin(), cur.ins_span.end());
        prev.vul_end = cur.vul_end;
      } else {
        merged.push_back(std::move(cur));
      }
    }
    hunks = std::move(merged);
  }

  for (std::size_t idx = 0; idx < hunks.size(); ++idx) {
    DiffHunk& h = hunks[idx];
    if (!h.del_span.empty()) continue;
    const std::size_t prev_end = (idx > 0) ? hunks[idx - 1].vul_end : 0;
    const std::size_t next_begin = (idx + 1 < hunks.size()) ? hunks[idx + 1].vul_begin : vul.size();
    if (h.vul_begin > prev_end || (idx == 0 && h.vul_begin > 0)) {
      --h.vul_begin;
      h.del_span.push_back(vul[h.vul_begin]);
      h.ins_span.insert(h.ins_span.begin(), vul[h.vul_begin]);
    } else if (h.vul_end < next_begin) {
      h.del_span.push_back(vul[h.vul_end]);
      h.ins_span.push_back(vul[h.vul_end]);
      ++h.vul_end;
    } else if (idx > 0) {
      // wedged between its neighbors: fold into the previous hunk
      DiffHunk& prev = hunks[idx - 1];
      prev.ins_span.insert(prev.ins_span.end(), h.ins_span.begin(), h.ins_span.end());
      hunks.erase(hunks.begin() + static_cast<std::ptrdiff_t>(idx));
      --idx;
    } else {
      throw Error(ErrorKind::empty_scope,
                  "pure insertion into empty text cannot be anchored");
    }
  }
  return hunks;
}

}  // namespace revstream
