// revstream — command-line surface for the token-stream revision engine:
// render trajectories, build alignment datasets from function pairs, run
// simulated decoding sessions, report token costs, and audit syntactic
// stability.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <CLI11.hpp>

#include "revstream/revstream.hpp"

namespace rs = revstream;

namespace {

// Stable exit contract: 0 success, 1 I/O, 2 grammar, 3 empty dataset,
// 4 invalid script, 5 checker unavailable.
int exit_code_for(const rs::Error& e) {
  switch (e.kind()) {
    case rs::ErrorKind::io_error: return 1;
    case rs::ErrorKind::invalid_script: return 4;
    case rs::ErrorKind::external_checker_unavailable: return 5;
    case rs::ErrorKind::unterminated_episode:
    case rs::ErrorKind::nested_episode:
    case rs::ErrorKind::sentinel_out_of_context:
    case rs::ErrorKind::empty_scope:
    case rs::ErrorKind::scope_not_found:
    case rs::ErrorKind::policy_exhausted: return 2;
    default: return 1;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw rs::Error(rs::ErrorKind::io_error, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rs::Error(rs::ErrorKind::io_error, "cannot write " + path);
  return out;
}

struct CommonOpts {
  std::uint64_t seed = 0;
  std::string profile = "word";
  std::string mode = "strict";
  std::string config_path;
};

void add_common(CLI::App* sub, CommonOpts& c) {
  sub->add_option("--seed", c.seed, "Run seed (env REVSTREAM_SEED)");
  sub->add_option("--profile", c.profile, "Tokenizer profile (env REVSTREAM_PROFILE)")
      ->check(CLI::IsMember({"char", "word"}));
  sub->add_option("--mode", c.mode, "Grammar handling")
      ->check(CLI::IsMember({"strict", "lenient"}));
  sub->add_option("--config", c.config_path, "JSON config file (flags > env > file > defaults)");
}

/// Option resolution with the documented precedence: command-line flags beat
/// environment variables beat config-file values beat defaults. The config
/// file is one JSON object; top-level scalars apply to every command and a
/// section named after the command overrides them.
class ConfigResolver {
 public:
  ConfigResolver(const CLI::App* cmd, const std::string& path, const std::string& section)
      : cmd_(cmd) {
    if (path.empty()) return;
    std::ifstream in(path);
    if (!in) throw rs::Error(rs::ErrorKind::io_error, "cannot open config " + path);
    rs::Json all = rs::Json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (all.is_discarded() || !all.is_object())
      throw rs::Error(rs::ErrorKind::io_error, "config is not a JSON object: " + path);
    for (const auto& [k, v] : all.items())
      if (!v.is_object()) merged_[k] = v;
    if (all.contains(section) && all[section].is_object())
      for (const auto& [k, v] : all[section].items()) merged_[k] = v;
  }

  template <typename T>
  void apply(const std::string& key, const char* env, T& value) const {
    if (cmd_->count("--" + key) > 0) return;
    if (env) {
      if (const char* e = std::getenv(env); e && *e) {
        assign_text(value, e);
        return;
      }
    }
    const auto it = merged_.find(key);
    if (it == merged_.end()) return;
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        value = it->second.template get<std::string>();
      } else {
        if (it->second.is_string())
          assign_text(value, it->second.template get<std::string>());
        else
          value = it->second.template get<T>();
      }
    } catch (const rs::Json::exception&) {
      throw rs::Error(rs::ErrorKind::io_error, "config key '" + key + "' has the wrong type");
    }
  }

 private:
  template <typename T>
  static void assign_text(T& value, const std::string& text) {
    try {
      if constexpr (std::is_same_v<T, std::string>) {
        value = text;
      } else if constexpr (std::is_floating_point_v<T>) {
        value = std::stod(text);
      } else {
        value = static_cast<T>(std::stoull(text));
      }
    } catch (const std::exception&) {
      throw rs::Error(rs::ErrorKind::io_error, "cannot parse value: " + text);
    }
  }

  const CLI::App* cmd_;
  std::map<std::string, rs::Json> merged_;
};

void resolve_common(CommonOpts& c, const ConfigResolver& cfg) {
  cfg.apply("seed", "REVSTREAM_SEED", c.seed);
  cfg.apply("profile", "REVSTREAM_PROFILE", c.profile);
  cfg.apply("mode", nullptr, c.mode);
  rs::profile_from_name(c.profile);
  rs::render_mode_from_name(c.mode);
}

// Every run logs its fully resolved configuration for reproducibility.
void log_config(const std::string& command, const CommonOpts& c, rs::Json extra) {
  extra["command"] = command;
  extra["seed"] = c.seed;
  extra["profile"] = c.profile;
  extra["mode"] = c.mode;
  std::cerr << extra.dump() << '\n';
}

// ---------------------------------------------------------------------------
// render
// ---------------------------------------------------------------------------

struct RenderArgs {
  CommonOpts common;
  std::string input;
  std::string events_out;
};

int run_render(const CLI::App* cmd, RenderArgs& a) {
  const ConfigResolver cfg(cmd, a.common.config_path, "render");
  resolve_common(a.common, cfg);
  cfg.apply("events-out", nullptr, a.events_out);
  log_config("render", a.common, {{"input", a.input}, {"events_out", a.events_out}});
  const rs::SentinelSet sents;
  const auto profile = rs::profile_from_name(a.common.profile);
  const auto mode = rs::render_mode_from_name(a.common.mode);
  const std::string text = read_file(a.input);
  const std::vector<rs::Token> tokens = rs::text_to_tokens(text, sents, profile);
  const rs::RenderResult res = rs::render(tokens, sents, mode);
  std::cout << rs::detokenize(res.buffer);
  if (!a.events_out.empty()) {
    auto out = open_output(a.events_out);
    rs::write_events(out, res.events);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// build-data
// ---------------------------------------------------------------------------

struct BuildArgs {
  CommonOpts common;
  std::string pairs_path;
  std::string out_path;
  std::string tier = "both";
  std::size_t latency_k = 8;
  std::size_t merge_gap = 0;
  std::string lambda;  // "r:g"
  std::string general_path;
  std::size_t workers = 0;
  std::string summary_out;
};

std::pair<std::size_t, std::size_t> parse_ratio(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw rs::Error(rs::ErrorKind::io_error, "--lambda expects r:g, got " + s);
  try {
    const std::size_t r = std::stoull(s.substr(0, colon));
    const std::size_t g = std::stoull(s.substr(colon + 1));
    return {r, g};
  } catch (const std::exception&) {
    throw rs::Error(rs::ErrorKind::io_error, "--lambda expects r:g, got " + s);
  }
}

int run_build(const CLI::App* cmd, BuildArgs& a) {
  const ConfigResolver cfg(cmd, a.common.config_path, "build-data");
  resolve_common(a.common, cfg);
  cfg.apply("tier", nullptr, a.tier);
  cfg.apply("latency-k", nullptr, a.latency_k);
  cfg.apply("merge-gap", nullptr, a.merge_gap);
  cfg.apply("lambda", nullptr, a.lambda);
  cfg.apply("general", nullptr, a.general_path);
  cfg.apply("workers", nullptr, a.workers);
  cfg.apply("summary-out", nullptr, a.summary_out);
  log_config("build-data", a.common,
             {{"pairs", a.pairs_path},
              {"out", a.out_path},
              {"tier", a.tier},
              {"latency_k", a.latency_k},
              {"merge_gap", a.merge_gap},
              {"lambda", a.lambda},
              {"general", a.general_path},
              {"workers", a.workers}});
  const rs::SentinelSet sents;

  std::ifstream in(a.pairs_path);
  if (!in) throw rs::Error(rs::ErrorKind::io_error, "cannot open " + a.pairs_path);
  const rs::PairReadResult pairs = rs::read_function_pairs(in);

  rs::BuildOptions opt;
  opt.profile = rs::profile_from_name(a.common.profile);
  opt.latency_k = a.latency_k;
  opt.seed = a.common.seed;
  opt.merge_gap = a.merge_gap;
  opt.sentinels = sents;
  opt.tier = rs::tier_filter_from_name(a.tier);
  opt.workers = a.workers;

  rs::BuildResult built = rs::build_dataset(pairs.pairs, opt);

  rs::Json summary = rs::summary_to_json(built.summary);
  summary["malformed_lines"] = pairs.skipped;

  std::vector<rs::TrajectoryRecord> final_records = std::move(built.records);
  if (!a.lambda.empty()) {
    if (a.general_path.empty())
      throw rs::Error(rs::ErrorKind::io_error, "--lambda requires --general");
    const auto [r, g] = parse_ratio(a.lambda);
    std::ifstream gin(a.general_path);
    if (!gin) throw rs::Error(rs::ErrorKind::io_error, "cannot open " + a.general_path);
    rs::RecordReadResult general = rs::read_general_corpus(gin, opt.profile);
    rs::MixResult mixed =
        rs::mix_corpora(std::move(final_records), std::move(general.records), r, g, a.common.seed);
    final_records = std::move(mixed.records);
    summary["general_malformed_lines"] = general.skipped;
    summary["revision_remainder"] = mixed.revision_remainder;
    summary["general_remainder"] = mixed.general_remainder;
  }
  summary["final_records"] = final_records.size();

  {
    auto out = open_output(a.out_path);
    rs::write_records(out, final_records, sents);
  }
  std::cout << summary.dump() << '\n';
  if (!a.summary_out.empty()) {
    auto out = open_output(a.summary_out);
    out << summary.dump() << '\n';
  }
  return final_records.empty() ? 3 : 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
  CommonOpts common;
  std::string policy;  // file path or "stochastic"
  std::string policy_format = "text";
  double bias = 0.0;
  std::string mask = "on";
  std::size_t context_len = 0;
  std::size_t steps = 64;
  std::vector<std::string> alphabet = {"a", "b", "c", "d"};
  double trigger_weight = 0.05;
  double close_weight = 0.35;
  double patch_stop_weight = 0.35;
  std::string events_out;
};

int run_simulate(const CLI::App* cmd, SimulateArgs& a) {
  const ConfigResolver cfg(cmd, a.common.config_path, "simulate");
  resolve_common(a.common, cfg);
  cfg.apply("policy-format", nullptr, a.policy_format);
  cfg.apply("bias", nullptr, a.bias);
  cfg.apply("mask", nullptr, a.mask);
  cfg.apply("L", nullptr, a.context_len);
  cfg.apply("steps", nullptr, a.steps);
  cfg.apply("trigger-weight", nullptr, a.trigger_weight);
  cfg.apply("close-weight", nullptr, a.close_weight);
  cfg.apply("patch-stop-weight", nullptr, a.patch_stop_weight);
  if (a.mask != "on" && a.mask != "off")
    throw rs::Error(rs::ErrorKind::io_error, "mask must be on or off, got " + a.mask);
  log_config("simulate", a.common,
             {{"policy", a.policy},
              {"policy_format", a.policy_format},
              {"bias", a.bias},
              {"mask", a.mask},
              {"L", a.context_len},
              {"steps", a.steps}});
  const rs::SentinelSet sents;
  const auto profile = rs::profile_from_name(a.common.profile);
  const auto mode = rs::render_mode_from_name(a.common.mode);

  std::unique_ptr<rs::Policy> policy;
  if (a.policy == "stochastic") {
    rs::StochasticSpec spec;
    spec.code_weights.clear();
    for (const std::string& t : a.alphabet) {
      if (t.empty() || sents.is_sentinel(t))
        throw rs::Error(rs::ErrorKind::io_error, "alphabet token is reserved or empty: " + t);
      spec.code_weights.emplace_back(t, 1.0);
    }
    spec.trigger_weight = a.trigger_weight;
    spec.close_weight = a.close_weight;
    spec.patch_stop_weight = a.patch_stop_weight;
    spec.code_budget = a.steps;
    spec.seed = a.common.seed;
    spec.sentinels = sents;
    policy = std::make_unique<rs::StochasticPolicy>(std::move(spec));
  } else {
    const std::string text = read_file(a.policy);
    std::vector<rs::Token> tokens;
    if (a.policy_format == "lines") {
      std::istringstream ss(text);
      std::string line;
      while (std::getline(ss, line))
        if (!line.empty()) tokens.push_back(line);
    } else {
      tokens = rs::text_to_tokens(text, sents, profile);
    }
    policy = std::make_unique<rs::ScriptedPolicy>(std::move(tokens));
  }

  const rs::SessionResult res = rs::decode_session(
      *policy, sents, rs::TriggerBias{a.bias}, a.mask == "on", a.context_len, mode);

  rs::Json out{{"buffer", rs::detokenize(res.buffer)},
               {"report", rs::cost_report_to_json(res.cost)}};
  std::cout << out.dump() << '\n';
  if (!a.events_out.empty()) {
    auto ev = open_output(a.events_out);
    rs::write_events(ev, res.events);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// cost
// ---------------------------------------------------------------------------

struct CostArgs {
  CommonOpts common;
  std::size_t L = 0;
  std::size_t N_v = 0;
  std::size_t N_s = 0;
  int agent_steps = 0;  // 0 = in-stream revision model
  std::size_t loc_output = 0;
  std::vector<std::size_t> critic_prompts;
  std::vector<std::size_t> scaling;
};

int run_cost(const CLI::App* cmd, CostArgs& a) {
  const ConfigResolver cfg(cmd, a.common.config_path, "cost");
  resolve_common(a.common, cfg);
  cfg.apply("L", nullptr, a.L);
  cfg.apply("Nv", nullptr, a.N_v);
  cfg.apply("Ns", nullptr, a.N_s);
  cfg.apply("agent", nullptr, a.agent_steps);
  cfg.apply("loc-output", nullptr, a.loc_output);
  if (a.agent_steps != 0 && a.agent_steps != 3 && a.agent_steps != 4)
    throw rs::Error(rs::ErrorKind::io_error, "agent workflow must be 3 or 4");
  log_config("cost", a.common,
             {{"L", a.L}, {"Nv", a.N_v}, {"Ns", a.N_s}, {"agent", a.agent_steps}});
  if (!a.scaling.empty()) {
    const auto rows = rs::scaling_experiment(a.scaling, a.N_v, a.N_s);
    std::cout << "L,delta_agent,delta_ours_measured,episodes\n";
    for (const auto& row : rows)
      std::cout << row.L << ',' << row.delta_agent << ',' << row.delta_ours_measured << ','
                << row.episodes << '\n';
    return 0;
  }
  if (a.agent_steps != 0) {
    const auto wf =
        a.agent_steps == 3 ? rs::AgentWorkflow::three_step : rs::AgentWorkflow::four_step;
    const rs::CostReport r =
        rs::cost_agent(a.L, a.N_v, a.N_s, wf, a.loc_output, a.critic_prompts);
    rs::Json out = rs::cost_report_to_json(r);
    out["model"] = "agent";
    out["steps"] = a.agent_steps;
    std::cout << out.dump() << '\n';
    return 0;
  }
  const rs::CostReport r = rs::cost_sor(a.L, a.N_s, rs::CostMode::idealized);
  rs::Json out = rs::cost_report_to_json(r);
  out["model"] = "sor";
  out["cost_mode"] = "idealized";
  std::cout << out.dump() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// validate
// ---------------------------------------------------------------------------

struct ValidateArgs {
  CommonOpts common;
  std::string pre_path;
  std::string post_path;
  std::string dataset_path;
  std::string checker = "builtin";
};

rs::WellformedChecker make_checker(const std::string& s) {
  if (s == "builtin") return rs::WellformedChecker::builtin();
  if (s.rfind("cmd:", 0) == 0) return rs::WellformedChecker::external_cmd(s.substr(4));
  throw rs::Error(rs::ErrorKind::io_error, "unknown checker: " + s);
}

int run_validate(const CLI::App* cmd, ValidateArgs& a) {
  const ConfigResolver cfg(cmd, a.common.config_path, "validate");
  resolve_common(a.common, cfg);
  cfg.apply("checker", nullptr, a.checker);
  log_config("validate", a.common,
             {{"pre", a.pre_path},
              {"post", a.post_path},
              {"dataset", a.dataset_path},
              {"checker", a.checker}});
  const rs::WellformedChecker checker = make_checker(a.checker);
  const rs::SentinelSet sents;
  const auto profile = rs::profile_from_name(a.common.profile);

  std::vector<std::pair<std::string, std::string>> texts;
  std::size_t revised = 0;
  std::size_t skipped = 0;
  if (!a.dataset_path.empty()) {
    std::ifstream in(a.dataset_path);
    if (!in) throw rs::Error(rs::ErrorKind::io_error, "cannot open " + a.dataset_path);
    const rs::RecordReadResult records = rs::read_records(in, sents, profile);
    skipped = records.skipped;
    for (const rs::TrajectoryRecord& rec : records.records) {
      const auto stream = rs::serialize(rec.trajectory, sents);
      const rs::RenderResult post = rs::render(stream, sents, rs::RenderMode::strict);
      texts.emplace_back(rs::detokenize(rs::code_projection(rec.trajectory)),
                         rs::detokenize(post.buffer));
      if (rec.trajectory.episode_count() > 0) ++revised;
    }
  } else {
    if (a.pre_path.empty() || a.post_path.empty())
      throw rs::Error(rs::ErrorKind::io_error, "validate needs --pre and --post, or --dataset");
    texts.emplace_back(read_file(a.pre_path), read_file(a.post_path));
  }

  const rs::StabilityCounts counts = rs::stability_matrix(texts, checker);
  rs::Json out = rs::stability_to_json(counts);
  if (!a.dataset_path.empty()) {
    out["records"] = texts.size();
    out["skipped"] = skipped;
    out["revision_rate"] =
        texts.empty() ? 0.0 : static_cast<double>(revised) / static_cast<double>(texts.size());
  }
  std::cout << out.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"revstream — token-stream revision engine"};
  app.require_subcommand(1);

  RenderArgs render_args;
  CLI::App* render_cmd = app.add_subcommand("render", "Compile a trajectory into program text");
  add_common(render_cmd, render_args.common);
  render_cmd->add_option("input", render_args.input, "Trajectory text file")->required();
  render_cmd->add_option("--events-out", render_args.events_out, "Write render events (JSONL)");

  BuildArgs build_args;
  CLI::App* build_cmd =
      app.add_subcommand("build-data", "Build trajectory records from function pairs");
  add_common(build_cmd, build_args.common);
  build_cmd->add_option("--pairs", build_args.pairs_path, "Input pairs (JSONL)")->required();
  build_cmd->add_option("--out", build_args.out_path, "Output records (JSONL)")->required();
  build_cmd->add_option("--tier", build_args.tier, "Tier filter")
      ->check(CLI::IsMember({"strict", "relaxed", "both"}));
  build_cmd->add_option("--latency-k", build_args.latency_k, "Max trigger latency in code tokens");
  build_cmd->add_option("--merge-gap", build_args.merge_gap, "Merge hunks separated by fewer common tokens");
  build_cmd->add_option("--lambda", build_args.lambda, "Mixing ratio r:g");
  build_cmd->add_option("--general", build_args.general_path, "General corpus (JSONL)");
  build_cmd->add_option("--workers", build_args.workers, "Worker threads (0 = auto)");
  build_cmd->add_option("--summary-out", build_args.summary_out, "Also write the summary here");

  SimulateArgs sim_args;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a decoding session");
  add_common(sim_cmd, sim_args.common);
  sim_cmd->add_option("--policy", sim_args.policy, "Script file or 'stochastic'")->required();
  sim_cmd->add_option("--policy-format", sim_args.policy_format, "Script file layout")
      ->check(CLI::IsMember({"text", "lines"}));
  sim_cmd->add_option("--bias", sim_args.bias, "Trigger logit bias");
  sim_cmd->add_option("--mask", sim_args.mask, "Localization mask enforcement")
      ->check(CLI::IsMember({"on", "off"}));
  sim_cmd->add_option("--L", sim_args.context_len, "Context length (accounting input)");
  sim_cmd->add_option("--steps", sim_args.steps, "Stochastic code-token budget");
  sim_cmd->add_option("--alphabet", sim_args.alphabet, "Stochastic code tokens")->delimiter(',');
  sim_cmd->add_option("--trigger-weight", sim_args.trigger_weight, "Stochastic trigger weight");
  sim_cmd->add_option("--close-weight", sim_args.close_weight, "Stochastic scope-close chance");
  sim_cmd->add_option("--patch-stop-weight", sim_args.patch_stop_weight,
                      "Stochastic patch-stop chance");
  sim_cmd->add_option("--events-out", sim_args.events_out, "Write session events (JSONL)");

  CostArgs cost_args;
  CLI::App* cost_cmd = app.add_subcommand("cost", "Closed-form and measured token costs");
  add_common(cost_cmd, cost_args.common);
  cost_cmd->add_option("--L", cost_args.L, "Context length");
  cost_cmd->add_option("--Nv", cost_args.N_v, "Draft (vulnerable span) length");
  cost_cmd->add_option("--Ns", cost_args.N_s, "Patch length");
  cost_cmd->add_option("--agent", cost_args.agent_steps, "Agent workflow steps")
      ->check(CLI::IsMember({3, 4}));
  cost_cmd->add_option("--loc-output", cost_args.loc_output, "Localization output tokens (4-step)");
  cost_cmd->add_option("--critic-prompt", cost_args.critic_prompts,
                       "Critic prompt sizes added to the input");
  cost_cmd->add_option("--scaling", cost_args.scaling, "Context lengths for the scaling table")
      ->delimiter(',');

  ValidateArgs val_args;
  CLI::App* val_cmd = app.add_subcommand("validate", "Pre/post revision stability matrix");
  add_common(val_cmd, val_args.common);
  val_cmd->add_option("--pre", val_args.pre_path, "Pre-revision text file");
  val_cmd->add_option("--post", val_args.post_path, "Post-revision text file");
  val_cmd->add_option("--dataset", val_args.dataset_path, "Record dataset (JSONL)");
  val_cmd->add_option("--checker", val_args.checker, "builtin or cmd:<command>");

  CLI11_PARSE(app, argc, argv);

  try {
    if (render_cmd->parsed()) return run_render(render_cmd, render_args);
    if (build_cmd->parsed()) return run_build(build_cmd, build_args);
    if (sim_cmd->parsed()) return run_simulate(sim_cmd, sim_args);
    if (cost_cmd->parsed()) return run_cost(cost_cmd, cost_args);
    if (val_cmd->parsed()) return run_validate(val_cmd, val_args);
  } catch (const rs::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
