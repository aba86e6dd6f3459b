#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

#include "revstream/diff.hpp"
#include "revstream/digest.hpp"
#include "revstream/episode.hpp"
#include "revstream/renderer.hpp"
#include "revstream/rng.hpp"
#include "revstream/token.hpp"

namespace revstream {

struct FunctionPair {
  std::string id;
  std::string vulnerable;
  std::string patched;
  std::map<std::string, std::string> meta;  // source_commit, cwe, language, ...
};

/// One dataset row: a task description paired with a revision trajectory that
/// renders to the patched function.
struct TrajectoryRecord {
  std::string id;
  std::string spec;  // opaque task description, may be empty
  Trajectory trajectory;
  std::string tier;  // "strict" | "relaxed" | "general"
  std::size_t latency_k = 0;
  std::map<std::string, std::string> meta;
};

struct ForgeOptions {
  TokenizerProfile profile = TokenizerProfile::word;
  std::size_t latency_k = 8;
  std::uint64_t seed = 0;
  std::size_t merge_gap = 0;
  SentinelSet sentinels = {};
};

inline bool contains_sentinel_spelling(std::string_view text, const SentinelSet& sents) {
  for (const Token& sp : sents.spellings())
    if (text.find(sp) != std::string_view::npos) return true;
  return false;
}

inline std::vector<DiffHunk> diff_function_pair(const FunctionPair& pair, TokenizerProfile profile,
                                                std::size_t merge_gap = 0) {
  if (pair.vulnerable == pair.patched)
    throw Error(ErrorKind::identical_pair, "pair " + pair.id + " has no diff");
  const std::vector<Token> vul = tokenize(pair.vulnerable, profile);
  const std::vector<Token> pat = tokenize(pair.patched, profile);
  return diff_tokens(vul, pat, merge_gap);
}

/// Linearizes a pair into a trajectory: the vulnerable tokens are emitted in
/// order and each hunk is followed, after a seeded latency of up to
/// `latency_k` code tokens, by an episode replacing its span. When the span
/// also occurs later in the emitted prefix, the scope is extended leftward
/// with buffer context until the right-most occurrence is the intended
/// window; running out of context raises ScopeAmbiguityUnresolvable.
inline TrajectoryRecord build_trajectory(const FunctionPair& pair, std::span<const DiffHunk> hunks,
                                         const ForgeOptions& opt) {
  const std::vector<Token> vul = tokenize(pair.vulnerable, opt.profile);
  SeededRng rng(mix_seed(opt.seed, fnv1a64(pair.id)));
  StreamRenderer renderer(opt.sentinels, RenderMode::strict);
  Trajectory traj;
  std::size_t emitted = 0;
  std::ptrdiff_t shift = 0;  // vulnerable index minus buffer index, past all applied hunks

  auto emit_code = [&](std::size_t upto) {
    for (; emitted < upto; ++emitted) {
      if (opt.sentinels.is_sentinel(vul[emitted]))
        throw Error(ErrorKind::sentinel_out_of_context,
                    "input text contains a reserved sentinel spelling", emitted);
      renderer.feed(vul[emitted]);
      traj.items.emplace_back(vul[emitted]);
    }
  };

  for (std::size_t h = 0; h < hunks.size(); ++h) {
    const DiffHunk& hunk = hunks[h];
    const std::size_t next_bound = (h + 1 < hunks.size()) ? hunks[h + 1].vul_begin : vul.size();
    const std::size_t d_max = std::min(opt.latency_k, next_bound - hunk.vul_end);
    const std::size_t d = static_cast<std::size_t>(rng.below(d_max + 1));
    emit_code(hunk.vul_end + d);

    const std::vector<Token>& buffer = renderer.buffer();
    const std::size_t target_end =
        static_cast<std::size_t>(static_cast<std::ptrdiff_t>(hunk.vul_end) - shift);
    std::size_t scope_begin =
        static_cast<std::size_t>(static_cast<std::ptrdiff_t>(hunk.vul_begin) - shift);
    RevisionEpisode ep{hunk.del_span, hunk.ins_span};
    for (;;) {
      const auto rm = rightmost_occurrence_end(buffer, ep.scope);
      if (!rm) throw std::logic_error("forge: scope vanished from its own buffer window");
      if (*rm == target_end) break;
      if (scope_begin == 0)
        throw Error(ErrorKind::scope_ambiguity_unresolvable,
                    "scope for " + pair.id + " cannot be disambiguated");
      --scope_begin;
      ep.scope.insert(ep.scope.begin(), buffer[scope_begin]);
      ep.patch.insert(ep.patch.begin(), buffer[scope_begin]);
    }

    renderer.feed(opt.sentinels.trigger);
    renderer.feed(opt.sentinels.scope_open);
    for (const Token& t : ep.scope) renderer.feed(t);
    renderer.feed(opt.sentinels.scope_close);
    renderer.feed(opt.sentinels.patch_open);
    for (const Token& t : ep.patch) renderer.feed(t);
    renderer.feed(opt.sentinels.patch_close);
    traj.items.emplace_back(std::move(ep));
    shift += static_cast<std::ptrdiff_t>(hunk.del_span.size()) -
             static_cast<std::ptrdiff_t>(hunk.ins_span.size());
  }
  emit_code(vul.size());
  renderer.finish();

  if (detokenize(renderer.buffer()) != pair.patched)
    throw std::logic_error("forge: rendered trajectory does not reproduce the patched text for " +
                           pair.id);

  TrajectoryRecord rec;
  rec.id = pair.id;
  rec.trajectory = std::move(traj);
  rec.latency_k = opt.latency_k;
  rec.meta = pair.meta;
  if (auto it = rec.meta.find("spec"); it != rec.meta.end()) {
    rec.spec = it->second;
    rec.meta.erase(it);
  }
  return rec;
}

// ---------------------------------------------------------------------------
// tier filtering
// ---------------------------------------------------------------------------

enum class Tier { strict, relaxed, rejected };

inline const char* tier_name(Tier t) {
  switch (t) {
    case Tier::strict: return "strict";
    case Tier::relaxed: return "relaxed";
    case Tier::rejected: return "rejected";
  }
  return "rejected";
}

/// Classifies one commit from its per-function hunk counts. The three labels
/// partition commits; a strict commit also satisfies the relaxed bounds.
inline Tier filter_tier(std::span<const std::size_t> per_function_hunk_counts) {
  const std::size_t funcs = per_function_hunk_counts.size();
  if (funcs == 0) return Tier::rejected;
  std::size_t max_hunks = 0;
  for (std::size_t c : per_function_hunk_counts) max_hunks = std::max(max_hunks, c);
  if (funcs == 1 && per_function_hunk_counts[0] == 1) return Tier::strict;
  if (funcs <= 5 && max_hunks <= 5) return Tier::relaxed;
  return Tier::rejected;
}

// ---------------------------------------------------------------------------
// dedup
// ---------------------------------------------------------------------------

inline std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_whitespace_byte(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
  }
  return out;
}

/// Near-duplicate signature: hash of the whitespace-collapsed scope/patch
/// pairs of the record's episodes, in stream order.
inline std::string diff_signature(const TrajectoryRecord& rec) {
  std::string acc;
  for (const auto& item : rec.trajectory.items) {
    const RevisionEpisode* ep = std::get_if<RevisionEpisode>(&item);
    if (!ep) continue;
    acc += collapse_whitespace(detokenize(ep->scope));
    acc += '\x1f';
    acc += collapse_whitespace(detokenize(ep->patch));
    acc += '\x1e';
  }
  return sha256_hex(acc);
}

struct DedupStats {
  std::size_t commit_duplicates = 0;
  std::size_t signature_duplicates = 0;
};

/// Two passes, first occurrence wins, order otherwise preserved. The commit
/// pass keys on (source_commit, vulnerable text) so sibling functions of one
/// multi-function commit survive; records without a commit skip that pass.
inline std::vector<TrajectoryRecord> dedup(std::vector<TrajectoryRecord> records,
                                           DedupStats* stats = nullptr) {
  DedupStats local;
  std::vector<TrajectoryRecord> out;
  out.reserve(records.size());
  std::unordered_set<std::string> commit_keys;
  std::unordered_set<std::string> signatures;
  for (TrajectoryRecord& rec : records) {
    std::string commit;
    if (auto it = rec.meta.find("source_commit"); it != rec.meta.end()) commit = it->second;
    if (!commit.empty()) {
      const std::string key =
          commit + '\x1f' + sha256_hex(detokenize(code_projection(rec.trajectory)));
      if (!commit_keys.insert(key).second) {
        ++local.commit_duplicates;
        continue;
      }
    }
    if (!signatures.insert(diff_signature(rec)).second) {
      ++local.signature_duplicates;
      continue;
    }
    out.push_back(std::move(rec));
  }
  if (stats) *stats = local;
  return out;
}

// ---------------------------------------------------------------------------
// corpus mixing
// ---------------------------------------------------------------------------

struct MixResult {
  std::vector<TrajectoryRecord> records;
  std::size_t revision_remainder = 0;
  std::size_t general_remainder = 0;
};

/// Deterministic block interleave: every emitted block holds `ratio_revision`
/// revision records followed by `ratio_general` general records, order within
/// each source preserved. Stops at the first block either source cannot fill;
/// the leftovers are reported, not emitted. The seed parameter is kept for
/// interface stability; the interleave itself draws nothing.
inline MixResult mix_corpora(std::vector<TrajectoryRecord> revision,
                             std::vector<TrajectoryRecord> general, std::size_t ratio_revision,
                             std::size_t ratio_general, std::uint64_t /*seed*/ = 0) {
  if (ratio_revision == 0 || ratio_general == 0)
    throw Error(ErrorKind::invalid_weights, "mixing ratio parts must be positive");
  MixResult out;
  std::size_t ri = 0, gi = 0;
  while (ri + ratio_revision <= revision.size() && gi + ratio_general <= general.size()) {
    for (std::size_t k = 0; k < ratio_revision; ++k) out.records.push_back(std::move(revision[ri++]));
    for (std::size_t k = 0; k < ratio_general; ++k) out.records.push_back(std::move(general[gi++]));
  }
  out.revision_remainder = revision.size() - ri;
  out.general_remainder = general.size() - gi;
  return out;
}

// ---------------------------------------------------------------------------
// whole pipeline
// ---------------------------------------------------------------------------

enum class TierFilter { strict_only, relaxed_only, both };

inline TierFilter tier_filter_from_name(std::string_view name) {
  if (name == "strict") return TierFilter::strict_only;
  if (name == "relaxed") return TierFilter::relaxed_only;
  if (name == "both") return TierFilter::both;
  throw Error(ErrorKind::io_error, "unknown tier filter: " + std::string(name));
}

struct BuildOptions : ForgeOptions {
  TierFilter tier = TierFilter::both;
  std::size_t workers = 0;  // 0 = hardware concurrency
};

struct BuildSummary {
  std::size_t input_pairs = 0;
  std::size_t identical_pairs = 0;
  std::size_t sentinel_collisions = 0;
  std::size_t diff_failures = 0;
  std::size_t strict_commits = 0;
  std::size_t relaxed_commits = 0;
  std::size_t rejected_commits = 0;
  std::size_t tier_filtered_out = 0;
  std::size_t ambiguity_skips = 0;
  std::size_t dedup_commit_drops = 0;
  std::size_t dedup_signature_drops = 0;
  std::size_t strict_records = 0;
  std::size_t relaxed_records = 0;
  std::size_t emitted = 0;
};

struct BuildResult {
  std::vector<TrajectoryRecord> records;
  BuildSummary summary;
};

/// diff -> tier -> build -> sort-by-id -> dedup. The per-pair map runs on a
/// worker pool; results land in input slots, so the outcome is independent of
/// the worker count.
inline BuildResult build_dataset(const std::vector<FunctionPair>& pairs, const BuildOptions& opt) {
  BuildResult result;
  BuildSummary& sum = result.summary;
  sum.input_pairs = pairs.size();

  struct PairState {
    std::vector<DiffHunk> hunks;
    bool usable = false;
    Tier tier = Tier::rejected;
  };
  std::vector<PairState> states(pairs.size());

  enum class PairFail { none, identical, sentinel, diff, ambiguity };
  std::vector<PairFail> failures(pairs.size(), PairFail::none);

  std::size_t workers = opt.workers ? opt.workers : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min<std::size_t>(workers, std::max<std::size_t>(pairs.size(), 1));

  auto run_parallel = [&](auto&& fn) {
    if (workers == 1 || pairs.size() < 2) {
      for (std::size_t i = 0; i < pairs.size(); ++i) fn(i);
      return;
    }
    std::vector<std::thread> pool;
    std::size_t chunk = (pairs.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t lo = w * chunk;
      const std::size_t hi = std::min(pairs.size(), lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      });
    }
    for (std::thread& t : pool) t.join();
  };

  run_parallel([&](std::size_t i) {
    const FunctionPair& p = pairs[i];
    if (contains_sentinel_spelling(p.vulnerable, opt.sentinels) ||
        contains_sentinel_spelling(p.patched, opt.sentinels)) {
      failures[i] = PairFail::sentinel;
      return;
    }
    try {
      states[i].hunks = diff_function_pair(p, opt.profile, opt.merge_gap);
      states[i].usable = true;
    } catch (const Error& e) {
      failures[i] = (e.kind() == ErrorKind::identical_pair) ? PairFail::identical : PairFail::diff;
    }
  });

  // group by commit, in first-appearance order; pairs without a commit form
  // singleton groups
  std::vector<std::string> group_keys;
  std::vector<std::vector<std::size_t>> groups;
  std::map<std::string, std::size_t> group_index;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!states[i].usable) continue;
    std::string key;
    if (auto it = pairs[i].meta.find("source_commit"); it != pairs[i].meta.end() && !it->second.empty())
      key = "c:" + it->second;
    else
      key = "i:" + pairs[i].id;
    auto [g, inserted] = group_index.emplace(key, groups.size());
    if (inserted) {
      group_keys.push_back(key);
      groups.emplace_back();
    }
    groups[g->second].push_back(i);
  }

  for (const auto& members : groups) {
    // duplicate retrievals of one function must not count as extra functions
    std::vector<std::size_t> counts;
    std::unordered_set<std::string> distinct;
    counts.reserve(members.size());
    for (std::size_t i : members)
      if (distinct.insert(pairs[i].vulnerable).second) counts.push_back(states[i].hunks.size());
    const Tier tier = filter_tier(counts);
    switch (tier) {
      case Tier::strict: ++sum.strict_commits; break;
      case Tier::relaxed: ++sum.relaxed_commits; break;
      case Tier::rejected: ++sum.rejected_commits; break;
    }
    for (std::size_t i : members) states[i].tier = tier;
  }

  std::vector<TrajectoryRecord> built(pairs.size());
  std::vector<bool> keep(pairs.size(), false);
  run_parallel([&](std::size_t i) {
    if (!states[i].usable) return;
    const Tier tier = states[i].tier;
    const bool wanted = (tier == Tier::strict && opt.tier != TierFilter::relaxed_only) ||
                        (tier == Tier::relaxed && opt.tier != TierFilter::strict_only);
    if (tier == Tier::rejected) return;
    if (!wanted) return;
    try {
      built[i] = build_trajectory(pairs[i], states[i].hunks, opt);
      built[i].tier = tier_name(tier);
      keep[i] = true;
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::scope_ambiguity_unresolvable)
        failures[i] = PairFail::ambiguity;
      else
        failures[i] = PairFail::diff;
    } catch (const std::exception&) {
      // one broken pair must not take a worker (and the run) down
      failures[i] = PairFail::diff;
    }
  });

  for (std::size_t i = 0; i < pairs.size(); ++i) {
    switch (failures[i]) {
      case PairFail::identical: ++sum.identical_pairs; break;
      case PairFail::sentinel: ++sum.sentinel_collisions; break;
      case PairFail::diff: ++sum.diff_failures; break;
      case PairFail::ambiguity: ++sum.ambiguity_skips; break;
      case PairFail::none:
        if (states[i].usable && !keep[i] && states[i].tier != Tier::rejected)
          ++sum.tier_filtered_out;
        break;
    }
  }

  std::vector<TrajectoryRecord> records;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (keep[i]) records.push_back(std::move(built[i]));
  std::stable_sort(records.begin(), records.end(),
                   [](const TrajectoryRecord& a, const TrajectoryRecord& b) { return a.id < b.id; });

  DedupStats ds;
  result.records = dedup(std::move(records), &ds);
  sum.dedup_commit_drops = ds.commit_duplicates;
  sum.dedup_signature_drops = ds.signature_duplicates;
  for (const TrajectoryRecord& rec : result.records) {
    if (rec.tier == "strict")
      ++sum.strict_records;
    else if (rec.tier == "relaxed")
      ++sum.relaxed_records;
  }
  sum.emitted = result.records.size();
  return result;
}

}  // namespace revstream
