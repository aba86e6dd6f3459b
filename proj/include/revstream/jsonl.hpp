#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "revstream/episode.hpp"
#include "revstream/forge.hpp"
#include "revstream/harness.hpp"
#include "revstream/validity.hpp"

namespace revstream {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// function pairs: {"id", "vulnerable", "patched", "spec"?, "meta"?{...}}
// ---------------------------------------------------------------------------

inline FunctionPair pair_from_json(const Json& j) {
  FunctionPair p;
  p.id = j.at("id").get<std::string>();
  p.vulnerable = j.at("vulnerable").get<std::string>();
  p.patched = j.at("patched").get<std::string>();
  if (j.contains("meta"))
    for (const auto& [k, v] : j.at("meta").items()) p.meta[k] = v.get<std::string>();
  if (j.contains("spec")) p.meta["spec"] = j.at("spec").get<std::string>();
  return p;
}

inline Json pair_to_json(const FunctionPair& p) {
  Json meta = Json::object();
  for (const auto& [k, v] : p.meta)
    if (k != "spec") meta[k] = v;
  Json j{{"id", p.id}, {"vulnerable", p.vulnerable}, {"patched", p.patched}, {"meta", meta}};
  if (auto it = p.meta.find("spec"); it != p.meta.end()) j["spec"] = it->second;
  return j;
}

struct PairReadResult {
  std::vector<FunctionPair> pairs;
  std::size_t skipped = 0;
};

inline PairReadResult read_function_pairs(std::istream& in) {
  PairReadResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      out.pairs.push_back(pair_from_json(Json::parse(line)));
    } catch (const Json::exception&) {
      ++out.skipped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// trajectory records:
// {"id", "spec", "trajectory", "meta"{"tier", "latency_k", "source_commit",
//  "cwe", "language", ...}}
// ---------------------------------------------------------------------------

inline Json record_to_json(const TrajectoryRecord& rec, const SentinelSet& sents = {}) {
  Json meta = Json::object();
  meta["tier"] = rec.tier;
  meta["latency_k"] = rec.latency_k;
  for (const char* key : {"source_commit", "cwe", "language"}) meta[key] = "";
  for (const auto& [k, v] : rec.meta) meta[k] = v;
  return Json{{"id", rec.id},
              {"spec", rec.spec},
              {"trajectory", tokens_to_text(serialize(rec.trajectory, sents))},
              {"meta", meta}};
}

inline TrajectoryRecord record_from_json(const Json& j, const SentinelSet& sents,
                                         TokenizerProfile profile,
                                         ParseMode mode = ParseMode::strict) {
  TrajectoryRecord rec;
  rec.id = j.at("id").get<std::string>();
  rec.spec = j.value("spec", std::string{});
  const auto tokens = text_to_tokens(j.at("trajectory").get<std::string>(), sents, profile);
  rec.trajectory = parse(tokens, sents, mode);
  if (j.contains("meta")) {
    for (const auto& [k, v] : j.at("meta").items()) {
      if (k == "tier") {
        rec.tier = v.get<std::string>();
      } else if (k == "latency_k") {
        rec.latency_k = v.get<std::size_t>();
      } else if (v.is_string()) {
        rec.meta[k] = v.get<std::string>();
      }
    }
  }
  return rec;
}

struct RecordReadResult {
  std::vector<TrajectoryRecord> records;
  std::size_t skipped = 0;
};

inline RecordReadResult read_records(std::istream& in, const SentinelSet& sents,
                                     TokenizerProfile profile) {
  RecordReadResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      out.records.push_back(record_from_json(Json::parse(line), sents, profile));
    } catch (const Json::exception&) {
      ++out.skipped;
    } catch (const Error&) {
      ++out.skipped;
    }
  }
  return out;
}

inline void write_records(std::ostream& out, std::span<const TrajectoryRecord> records,
                          const SentinelSet& sents = {}) {
  for (const TrajectoryRecord& rec : records)
    out << record_to_json(rec, sents).dump() << '\n';
}

/// General-instruction rows: {"id", "spec", "code"}. These become
/// episode-free trajectories with tier "general".
inline RecordReadResult read_general_corpus(std::istream& in, TokenizerProfile profile) {
  RecordReadResult out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      TrajectoryRecord rec;
      rec.id = j.at("id").get<std::string>();
      rec.spec = j.value("spec", std::string{});
      rec.tier = "general";
      for (Token& t : tokenize(j.at("code").get<std::string>(), profile))
        rec.trajectory.items.emplace_back(std::move(t));
      out.records.push_back(std::move(rec));
    } catch (const Json::exception&) {
      ++out.skipped;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

inline Json summary_to_json(const BuildSummary& s) {
  return Json{{"input_pairs", s.input_pairs},
              {"identical_pairs", s.identical_pairs},
              {"sentinel_collisions", s.sentinel_collisions},
              {"diff_failures", s.diff_failures},
              {"strict_commits", s.strict_commits},
              {"relaxed_commits", s.relaxed_commits},
              {"rejected_commits", s.rejected_commits},
              {"tier_filtered_out", s.tier_filtered_out},
              {"ambiguity_skips", s.ambiguity_skips},
              {"dedup_commit_drops", s.dedup_commit_drops},
              {"dedup_signature_drops", s.dedup_signature_drops},
              {"strict_records", s.strict_records},
              {"relaxed_records", s.relaxed_records},
              {"emitted", s.emitted}};
}

inline Json cost_report_to_json(const CostReport& r) {
  return Json{{"L", r.context_len},
              {"N_v", r.draft_len},
              {"N_s", r.patch_len},
              {"measured_input", r.measured_input},
              {"measured_output", r.measured_output},
              {"idealized_overhead", r.idealized_overhead},
              {"measured_overhead", r.measured_overhead},
              {"episodes", r.episodes},
              {"total", r.total()}};
}

inline Json event_to_json(const RenderEvent& ev) {
  switch (ev.kind) {
    case RenderEvent::Kind::append:
      return Json{{"kind", "append"}, {"index", ev.token_index}, {"token", ev.token}};
    case RenderEvent::Kind::revision_applied:
      return Json{{"kind", "revision_applied"},
                  {"index", ev.token_index},
                  {"window_begin", ev.window_begin},
                  {"window_end", ev.window_end},
                  {"old", ev.old_span},
                  {"new", ev.new_span}};
    case RenderEvent::Kind::revision_discarded:
      return Json{{"kind", "revision_discarded"},
                  {"index", ev.token_index},
                  {"reason", error_kind_name(ev.reason)}};
  }
  return Json::object();
}

inline void write_events(std::ostream& out, std::span<const RenderEvent> events) {
  for (const RenderEvent& ev : events) out << event_to_json(ev).dump() << '\n';
}

inline Json stability_to_json(const StabilityCounts& c) {
  return Json{{"stable", c.stable},
              {"regressed", c.regressed},
              {"fixed", c.fixed},
              {"stable_fail", c.stable_fail},
              {"total", c.total()}};
}

}  // namespace revstream
