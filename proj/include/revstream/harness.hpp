#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "revstream/constraint.hpp"
#include "revstream/episode.hpp"
#include "revstream/error.hpp"
#include "revstream/forge.hpp"
#include "revstream/renderer.hpp"
#include "revstream/rng.hpp"

namespace revstream {

/// Scalar added to the trigger token's pre-normalization score. Zero leaves
/// the policy's distribution untouched.
struct TriggerBias {
  double value = 0.0;
};

struct CostReport {
  std::size_t context_len = 0;  // L
  std::size_t draft_len = 0;    // N_v
  std::size_t patch_len = 0;    // N_s
  std::size_t measured_input = 0;
  std::size_t measured_output = 0;
  std::size_t idealized_overhead = 0;  // one per episode for in-stream revision
  std::size_t measured_overhead = 0;   // tokens spent beyond plain code emission
  std::size_t episodes = 0;

  std::size_t total() const { return measured_input + measured_output; }
};

// ---------------------------------------------------------------------------
// policies
// ---------------------------------------------------------------------------

struct PolicyContext {
  RenderPhase phase = RenderPhase::transparent;
  const ValidSet* mask = nullptr;  // set while localizing with enforcement on
  const std::vector<Token>* buffer = nullptr;
  double trigger_bias = 0.0;
};

/// Token source standing in for a model's next-token distribution.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::optional<Token> next(const PolicyContext& ctx) = 0;  // nullopt = end of stream
};

class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(std::vector<Token> script) : script_(std::move(script)) {}

  std::optional<Token> next(const PolicyContext&) override {
    if (pos_ >= script_.size()) return std::nullopt;
    return script_[pos_++];
  }

 private:
  std::vector<Token> script_;
  std::size_t pos_ = 0;
};

inline ScriptedPolicy replay_policy(const TrajectoryRecord& rec, const SentinelSet& sents = {}) {
  return ScriptedPolicy(serialize(rec.trajectory, sents));
}

struct StochasticSpec {
  std::vector<std::pair<Token, double>> code_weights = {
      {"a", 1.0}, {"b", 1.0}, {"c", 1.0}, {"d", 1.0}};
  double trigger_weight = 0.05;    // pre-normalization weight of the trigger
  double close_weight = 0.35;      // chance to close the scope once legal
  double patch_stop_weight = 0.35; // chance to end the patch before each token
  std::size_t code_budget = 64;    // code tokens to emit before stopping
  std::uint64_t seed = 0;
  SentinelSet sentinels = {};
};

/// Seeded synthetic generator. After every code token it decides once whether
/// to open an episode; the decision stream is keyed to the code position, so
/// a larger trigger bias can only widen the set of positions that fire.
/// Scope tokens come from the mask when one is supplied (restricted and
/// renormalized) and from the raw code table otherwise.
class StochasticPolicy final : public Policy {
 public:
  explicit StochasticPolicy(StochasticSpec spec)
      : spec_(std::move(spec)),
        trigger_rng_(mix_seed(spec_.seed, 0xA1)),
        code_rng_(mix_seed(spec_.seed, 0xB2)),
        scope_rng_(mix_seed(spec_.seed, 0xC3)),
        patch_rng_(mix_seed(spec_.seed, 0xD4)) {
    for (const auto& [tok, w] : spec_.code_weights) {
      if (w < 0) throw Error(ErrorKind::invalid_weights, "negative code weight");
      total_code_weight_ += w;
    }
    if (spec_.code_weights.empty() || total_code_weight_ <= 0)
      throw Error(ErrorKind::invalid_weights, "code weights must be non-empty and positive");
  }

  std::optional<Token> next(const PolicyContext& ctx) override {
    switch (ctx.phase) {
      case RenderPhase::transparent: {
        if (emitted_code_ > 0 && decided_after_ < emitted_code_) {
          decided_after_ = emitted_code_;
          const double u = trigger_rng_.uniform01();
          const double w_trig = spec_.trigger_weight * std::exp(ctx.trigger_bias);
          const double p = w_trig / (w_trig + total_code_weight_);
          if (u < p) return spec_.sentinels.trigger;
        }
        if (emitted_code_ >= spec_.code_budget) return std::nullopt;
        ++emitted_code_;
        return sample_weighted(code_rng_);
      }
      case RenderPhase::expect_scope_open:
        scope_len_ = 0;
        return spec_.sentinels.scope_open;
      case RenderPhase::in_scope: {
        if (scope_len_ >= 1) {
          const bool dead_end = ctx.mask && ctx.mask->continuations.empty();
          if (dead_end || scope_rng_.uniform01() < spec_.close_weight)
            return spec_.sentinels.scope_close;
        }
        ++scope_len_;
        if (ctx.mask) return sample_restricted(scope_rng_, ctx.mask->continuations);
        return sample_weighted(scope_rng_);  // unmasked: may hallucinate
      }
      case RenderPhase::expect_patch_open:
        return spec_.sentinels.patch_open;
      case RenderPhase::in_patch: {
        if (patch_rng_.uniform01() < spec_.patch_stop_weight)
          return spec_.sentinels.patch_close;
        return sample_weighted(patch_rng_);
      }
    }
    return std::nullopt;
  }

 private:
  Token sample_weighted(SeededRng& rng) {
    double u = rng.uniform01() * total_code_weight_;
    for (const auto& [tok, w] : spec_.code_weights) {
      u -= w;
      if (u < 0) return tok;
    }
    return spec_.code_weights.back().first;
  }

  Token sample_restricted(SeededRng& rng, const std::vector<Token>& allowed) {
    double total = 0.0;
    for (const Token& t : allowed) total += weight_of(t);
    double u = rng.uniform01() * total;
    for (const Token& t : allowed) {
      u -= weight_of(t);
      if (u < 0) return t;
    }
    return allowed.back();
  }

  double weight_of(const Token& t) const {
    for (const auto& [tok, w] : spec_.code_weights)
      if (tok == t) return w;
    return 1.0;  // buffer tokens outside the table still need mass
  }

  StochasticSpec spec_;
  SeededRng trigger_rng_;
  SeededRng code_rng_;
  SeededRng scope_rng_;
  SeededRng patch_rng_;
  double total_code_weight_ = 0.0;
  std::size_t emitted_code_ = 0;
  std::size_t decided_after_ = 0;
  std::size_t scope_len_ = 0;
};

// ---------------------------------------------------------------------------
// decoding sessions
// ---------------------------------------------------------------------------

struct SessionResult {
  std::vector<Token> buffer;
  std::vector<RenderEvent> events;
  CostReport cost;
};

/// Runs one decoding loop: the policy proposes tokens, the localization mask
/// vets them while a scope is open (a scripted violation is InvalidScript),
/// and the renderer consumes whatever survives. `context_len` is an
/// accounting input only.
inline SessionResult decode_session(Policy& policy, const SentinelSet& sentinels, TriggerBias bias,
                                    bool enforce_mask, std::size_t context_len,
                                    RenderMode mode = RenderMode::strict,
                                    ConstraintBackend backend = ConstraintBackend::position_list) {
  StreamRenderer renderer(sentinels, mode, backend);
  std::optional<ConstraintState> constraint;
  ValidSet mask;
  std::size_t fed = 0;

  for (;;) {
    PolicyContext ctx;
    ctx.phase = renderer.phase();
    ctx.buffer = &renderer.buffer();
    ctx.trigger_bias = bias.value;
    const bool masking = enforce_mask && ctx.phase == RenderPhase::in_scope;
    if (masking) {
      mask = constraint->valid_set();
      ctx.mask = &mask;
    }

    const std::optional<Token> tok = policy.next(ctx);
    if (!tok) break;

    if (masking) {
      const SentinelKind sk = sentinels.classify(*tok);
      const bool ok = (sk == SentinelKind::scope_close)
                          ? mask.closure_allowed
                          : (sk == SentinelKind::none && mask.contains(*tok));
      if (!ok)
        throw Error(ErrorKind::invalid_script, "proposal violates the localization mask: " + *tok,
                    fed);
    }

    const RenderPhase before = renderer.phase();
    renderer.feed(*tok);
    ++fed;
    const RenderPhase after = renderer.phase();

    if (enforce_mask) {
      if (before == RenderPhase::expect_scope_open && after == RenderPhase::in_scope) {
        if (renderer.buffer().empty())
          throw Error(ErrorKind::invalid_script, "revision triggered on an empty buffer", fed - 1);
        constraint = open_constraint(renderer.buffer(), backend);
      } else if (before == RenderPhase::in_scope && after == RenderPhase::in_scope &&
                 sentinels.classify(*tok) == SentinelKind::none) {
        constraint = constraint->advance(*tok);
      } else if (after == RenderPhase::transparent) {
        constraint.reset();
      }
    }
  }

  try {
    renderer.finish();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::unterminated_episode)
      throw Error(ErrorKind::policy_exhausted, "policy ended mid-episode", fed);
    throw;
  }

  SessionResult out;
  out.buffer = renderer.buffer();
  out.events = renderer.events();
  out.cost.context_len = context_len;
  out.cost.measured_input = context_len;
  out.cost.measured_output = fed;
  out.cost.episodes = renderer.revisions_applied();
  out.cost.idealized_overhead = out.cost.episodes;
  out.cost.measured_overhead = fed - renderer.code_tokens();
  return out;
}

// ---------------------------------------------------------------------------
// closed-form cost models
// ---------------------------------------------------------------------------

enum class AgentWorkflow { three_step, four_step };

/// Post-hoc agent accounting. Three-step: generate, then one full re-read for
/// detect+repair (2L + 2N_v + N_s). Four-step adds a localization re-read and
/// its output. Critic prompt sizes are free parameters added to the input.
inline CostReport cost_agent(std::size_t L, std::size_t N_v, std::size_t N_s, AgentWorkflow steps,
                             std::size_t loc_output = 0,
                             std::span<const std::size_t> critic_prompts = {}) {
  CostReport r;
  r.context_len = L;
  r.draft_len = N_v;
  r.patch_len = N_s;
  if (steps == AgentWorkflow::three_step) {
    r.measured_input = 2 * L + N_v;
    r.measured_output = N_v + N_s;
  } else {
    r.measured_input = 3 * L + 2 * N_v;
    r.measured_output = N_v + loc_output + N_s;
  }
  for (std::size_t p : critic_prompts) r.measured_input += p;
  r.idealized_overhead = r.total() - (L + N_s);
  r.measured_overhead = r.idealized_overhead;
  r.episodes = 0;
  return r;
}

enum class CostMode { idealized, measured };

/// In-stream revision accounting. Idealized counts the trigger alone
/// (L + 1 + N_s); measured charges the full episode framing plus the
/// caller-supplied resume length.
inline CostReport cost_sor(std::size_t L, std::size_t N_s, CostMode mode,
                           const RevisionEpisode* episode = nullptr, std::size_t resume_len = 0) {
  CostReport r;
  r.context_len = L;
  r.patch_len = N_s;
  if (mode == CostMode::idealized) {
    r.measured_input = L;
    r.measured_output = 1 + N_s;
    r.idealized_overhead = 1;
    r.measured_overhead = 1;
    r.episodes = 1;
    return r;
  }
  r.measured_input = L;
  if (!episode) {
    r.measured_output = resume_len;
    return r;
  }
  const std::size_t ep_cost = episode->scope.size() + episode->patch.size() + 5;
  r.measured_output = ep_cost + resume_len;
  r.measured_overhead = ep_cost;
  r.idealized_overhead = 1;
  r.episodes = 1;
  return r;
}

// ---------------------------------------------------------------------------
// scaling experiment
// ---------------------------------------------------------------------------

struct ScalingRow {
  std::size_t L = 0;
  std::size_t delta_agent = 0;
  std::size_t delta_ours_measured = 0;
  std::size_t episodes = 0;
};

/// One measured session per context length, with a fixed synthetic script
/// that drafts an N_v-token span and revises it into an N_s-token patch.
/// The agent column is the three-step closed form. Rows come out sorted by L.
inline std::vector<ScalingRow> scaling_experiment(std::span<const std::size_t> L_values,
                                                  std::size_t N_v, std::size_t N_s) {
  std::vector<std::size_t> ls(L_values.begin(), L_values.end());
  std::sort(ls.begin(), ls.end());
  SentinelSet sents;
  std::vector<Token> script;
  std::vector<Token> draft, patch;
  for (std::size_t i = 0; i < N_v; ++i) draft.push_back("v" + std::to_string(i));
  for (std::size_t i = 0; i < N_s; ++i) patch.push_back("p" + std::to_string(i));
  script = draft;
  if (N_v > 0) {
    script.push_back(sents.trigger);
    script.push_back(sents.scope_open);
    script.insert(script.end(), draft.begin(), draft.end());
    script.push_back(sents.scope_close);
    script.push_back(sents.patch_open);
    script.insert(script.end(), patch.begin(), patch.end());
    script.push_back(sents.patch_close);
  }

  std::vector<ScalingRow> rows;
  rows.reserve(ls.size());
  for (std::size_t L : ls) {
    ScriptedPolicy pol(script);
    const SessionResult res = decode_session(pol, sents, {}, /*enforce_mask=*/true, L);
    const CostReport agent = cost_agent(L, N_v, N_s, AgentWorkflow::three_step);
    rows.push_back({L, agent.idealized_overhead, res.cost.measured_overhead, res.cost.episodes});
  }
  return rows;
}

}  // namespace revstream
