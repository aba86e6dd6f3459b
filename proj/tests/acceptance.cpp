// Acceptance suite: one line per criterion, nonzero exit if any fails.
// Criterion 10 shells out to the CLI named by REVSTREAM_CLI.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "revstream/revstream.hpp"

namespace fs = std::filesystem;
namespace rs = revstream;

namespace {

const rs::SentinelSet kSents;

struct Outcome {
  bool pass = true;
  std::string note;
};

std::vector<rs::Token> random_buffer(std::mt19937_64& rng, std::size_t max_len,
                                     std::size_t alphabet) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> pick(0, alphabet - 1);
  std::vector<rs::Token> out;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i)
    out.emplace_back(1, static_cast<char>('a' + pick(rng)));
  return out;
}

bool is_substring(const std::vector<rs::Token>& buffer, const std::vector<rs::Token>& needle) {
  if (needle.empty()) return true;
  if (needle.size() > buffer.size()) return false;
  for (std::size_t s = 0; s + needle.size() <= buffer.size(); ++s) {
    bool ok = true;
    for (std::size_t k = 0; k < needle.size(); ++k)
      if (buffer[s + k] != needle[k]) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// synthetic function pairs (shared by criteria 4 and 10)
// ---------------------------------------------------------------------------

struct SyntheticPair {
  rs::FunctionPair pair;
  bool duplicate_span_stress = false;
};

std::string rand_word(std::mt19937_64& rng, std::size_t min_len = 1, std::size_t max_len = 5) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::uniform_int_distribution<int> pick(0, 7);
  std::string w;
  const std::size_t n = len(rng);
  for (std::size_t i = 0; i < n; ++i) w += static_cast<char>('a' + pick(rng));
  return w;
}

std::string rand_text(std::mt19937_64& rng, std::size_t min_words, std::size_t max_words) {
  std::uniform_int_distribution<std::size_t> count(min_words, max_words);
  const std::size_t n = count(rng);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += rand_word(rng);
    if (rng() % 5 == 0) out += ';';
  }
  return out;
}

std::vector<SyntheticPair> make_synthetic_pairs(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 rng(seed);
  std::vector<SyntheticPair> out;
  out.reserve(count);
  while (out.size() < count) {
    SyntheticPair sp;
    const int category = static_cast<int>(out.size() % 5);
    std::string vul = rand_text(rng, 4, 24);
    std::string pat;
    switch (category) {
      case 0:
      case 1: {  // one or several replacements
        pat = vul;
        const int edits = category == 0 ? 1 : 2 + static_cast<int>(rng() % 3);
        for (int e = 0; e < edits; ++e) {
          if (pat.empty()) break;
          const std::size_t at = rng() % pat.size();
          const std::size_t len = 1 + rng() % std::min<std::size_t>(4, pat.size() - at);
          pat = pat.substr(0, at) + rand_word(rng, 1, 4) + pat.substr(at + len);
        }
        break;
      }
      case 2: {  // pure deletion
        const std::size_t at = rng() % vul.size();
        const std::size_t len = 1 + rng() % std::min<std::size_t>(6, vul.size() - at);
        pat = vul.substr(0, at) + vul.substr(at + len);
        break;
      }
      case 3: {  // pure insertion
        const std::size_t at = rng() % (vul.size() + 1);
        pat = vul.substr(0, at) + rand_word(rng, 1, 5) + vul.substr(at);
        break;
      }
      default: {  // duplicate-span stress: edit the first of two planted copies
        const std::string prefix = rand_text(rng, 1, 4);
        const std::string span = rand_text(rng, 2, 4);
        const std::string mid = rand_text(rng, 1, 5);
        const std::string tail = rand_text(rng, 0, 3);
        std::string edited = span;
        edited[rng() % edited.size()] = 'Z';
        vul = prefix + " " + span + " " + mid + " " + span + " " + tail;
        pat = prefix + " " + edited + " " + mid + " " + span + " " + tail;
        sp.duplicate_span_stress = true;
        break;
      }
    }
    if (pat == vul || pat.empty()) continue;
    sp.pair.id = "pair-" + std::to_string(out.size());
    sp.pair.vulnerable = vul;
    sp.pair.patched = pat;
    sp.pair.meta["source_commit"] = "commit-" + std::to_string(out.size());
    sp.pair.meta["cwe"] = "CWE-000";
    sp.pair.meta["language"] = "c";
    out.push_back(std::move(sp));
  }
  return out;
}

// ---------------------------------------------------------------------------
// criteria
// ---------------------------------------------------------------------------

Outcome mask_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::size_t cases = 0;
  for (; cases < 1000; ++cases) {
    const auto buffer = random_buffer(rng, 64, 1 + rng() % 8);
    for (auto backend :
         {rs::ConstraintBackend::position_list, rs::ConstraintBackend::substring_index}) {
      auto st = rs::open_constraint(buffer, backend);
      std::vector<rs::Token> partial;
      const std::size_t steps = rng() % 9;
      for (std::size_t s = 0; s <= steps; ++s) {
        const rs::ValidSet inc = st.valid_set();
        const rs::ValidSet oracle = rs::brute_force_valid_set(buffer, partial);
        if (inc.continuations != oracle.continuations ||
            inc.closure_allowed != oracle.closure_allowed)
          return {false, "mismatch at case " + std::to_string(cases)};
        if (inc.continuations.empty() || s == steps) break;
        const rs::Token tok = inc.continuations[rng() % inc.continuations.size()];
        st = st.advance(tok);
        partial.push_back(tok);
      }
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 5.0) return {false, "took " + std::to_string(secs) + "s, budget is 5s"};
  return {true, std::to_string(cases) + "/1000 cases, both backends, exact set equality"};
}

Outcome substring_soundness_completeness() {
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1002);
  std::size_t buffers = 0;

  // soundness on 400 larger buffers
  for (int iter = 0; iter < 400; ++iter, ++buffers) {
    const auto buffer = random_buffer(rng, 64, 1 + rng() % 8);
    auto st = rs::open_constraint(buffer, rs::ConstraintBackend::substring_index);
    std::vector<rs::Token> walked;
    const std::size_t steps = 1 + rng() % 12;
    for (std::size_t s = 0; s < steps; ++s) {
      const rs::ValidSet v = st.valid_set();
      if (v.continuations.empty()) break;
      const rs::Token tok = v.continuations[rng() % v.continuations.size()];
      st = st.advance(tok);
      walked.push_back(tok);
      if (!is_substring(buffer, walked))
        return {false, "accepted scope is not a substring"};
    }
  }

  // completeness: exhaustive equivalence on 100 small buffers
  for (int iter = 0; iter < 100; ++iter, ++buffers) {
    const auto buffer = random_buffer(rng, 12, 1 + rng() % 4);

    std::set<std::vector<rs::Token>> substrings;
    for (std::size_t b = 0; b < buffer.size(); ++b)
      for (std::size_t e = b + 1; e <= std::min(buffer.size(), b + 8); ++e)
        substrings.emplace(buffer.begin() + static_cast<std::ptrdiff_t>(b),
                           buffer.begin() + static_cast<std::ptrdiff_t>(e));

    std::set<std::vector<rs::Token>> reached;
    struct Node {
      rs::ConstraintState st;
      std::vector<rs::Token> path;
    };
    std::vector<Node> frontier{{rs::open_constraint(buffer, rs::ConstraintBackend::position_list), {}}};
    while (!frontier.empty()) {
      Node node = std::move(frontier.back());
      frontier.pop_back();
      if (node.path.size() >= 8) continue;
      for (const rs::Token& tok : node.st.valid_set().continuations) {
        Node next{node.st.advance(tok), node.path};
        next.path.push_back(tok);
        reached.insert(next.path);
        frontier.push_back(std::move(next));
      }
    }
    if (reached != substrings)
      return {false, "exhaustive walk disagrees with the substring set"};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (secs >= 10.0) return {false, "took " + std::to_string(secs) + "s, budget is 10s"};
  return {true, std::to_string(buffers) + " buffers: walks sound, substrings <=8 all reachable"};
}

Outcome rightmost_splice_law() {
  std::mt19937_64 rng(1003);
  std::size_t cases = 0;
  while (cases < 1000) {
    auto piece = [&](std::size_t lo, std::size_t hi) {
      std::vector<rs::Token> out;
      const std::size_t n = lo + rng() % (hi - lo + 1);
      for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(1, static_cast<char>('a' + rng() % 3));
      return out;
    };
    const std::vector<rs::Token> s = piece(1, 5);
    std::vector<rs::Token> buffer = piece(0, 6);
    buffer.insert(buffer.end(), s.begin(), s.end());
    const auto mid = piece(0, 4);
    buffer.insert(buffer.end(), mid.begin(), mid.end());
    buffer.insert(buffer.end(), s.begin(), s.end());
    const auto tail = piece(0, 4);
    buffer.insert(buffer.end(), tail.begin(), tail.end());
    const std::vector<rs::Token> patch = piece(0, 4);

    std::size_t occurrences = 0;
    std::size_t jstar = 0;
    for (std::size_t start = 0; start + s.size() <= buffer.size(); ++start) {
      bool ok = true;
      for (std::size_t k = 0; k < s.size(); ++k)
        if (buffer[start + k] != s[k]) {
          ok = false;
          break;
        }
      if (ok) {
        ++occurrences;
        jstar = start + s.size();
      }
    }
    if (occurrences < 2) continue;

    std::vector<rs::Token> expected(buffer.begin(),
                                    buffer.begin() + static_cast<std::ptrdiff_t>(jstar - s.size()));
    expected.insert(expected.end(), patch.begin(), patch.end());
    expected.insert(expected.end(), buffer.begin() + static_cast<std::ptrdiff_t>(jstar),
                    buffer.end());

    const auto backend = (cases % 2 == 0) ? rs::ConstraintBackend::position_list
                                          : rs::ConstraintBackend::substring_index;
    std::vector<rs::Token> actual = buffer;
    rs::apply_revision(actual, s, patch, backend);
    if (actual != expected) return {false, "splice mismatch at case " + std::to_string(cases)};
    ++cases;
  }
  return {true, "1000/1000 multi-occurrence splices byte-exact"};
}

Outcome forge_round_trip() {
  const auto pairs = make_synthetic_pairs(1004, 500);
  std::size_t dup_total = 0, dup_skips = 0, built = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const SyntheticPair& sp = pairs[i];
    rs::ForgeOptions opt;
    opt.profile = (i % 2 == 0) ? rs::TokenizerProfile::word : rs::TokenizerProfile::character;
    opt.latency_k = 8;
    opt.seed = 77;
    if (sp.duplicate_span_stress) ++dup_total;
    try {
      const auto hunks = rs::diff_function_pair(sp.pair, opt.profile);
      const rs::TrajectoryRecord rec = rs::build_trajectory(sp.pair, hunks, opt);
      const auto stream = rs::serialize(rec.trajectory, kSents);
      const std::string rendered = rs::detokenize(rs::render(stream, kSents).buffer);
      if (rendered != sp.pair.patched)
        return {false, "round-trip mismatch on " + sp.pair.id};
      ++built;
    } catch (const rs::Error& e) {
      if (e.kind() == rs::ErrorKind::scope_ambiguity_unresolvable && sp.duplicate_span_stress) {
        ++dup_skips;
        continue;
      }
      return {false, std::string("unexpected error on ") + sp.pair.id + ": " + e.what()};
    }
  }
  if (dup_total == 0) return {false, "no duplicate-span fixtures generated"};
  if (static_cast<double>(dup_skips) >= 0.02 * static_cast<double>(dup_total))
    return {false, "too many ambiguity skips: " + std::to_string(dup_skips) + "/" +
                       std::to_string(dup_total)};
  return {true, std::to_string(built) + "/500 byte-exact, " + std::to_string(dup_skips) + "/" +
                    std::to_string(dup_total) + " duplicate-span skips"};
}

Outcome cost_closed_forms() {
  if (rs::cost_agent(100, 10, 5, rs::AgentWorkflow::three_step).total() != 225)
    return {false, "three-step agent total is not 225"};
  if (rs::cost_sor(100, 5, rs::CostMode::idealized).total() != 106)
    return {false, "idealized in-stream total is not 106"};

  std::vector<std::size_t> Ls;
  for (std::size_t p = 8; p <= 14; ++p) Ls.push_back(std::size_t{1} << p);
  const auto rows = rs::scaling_experiment(Ls, 12, 4);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].episodes != 1) return {false, "scaling row missing its episode"};
    if (i == 0) continue;
    const std::size_t dl = rows[i].L - rows[i - 1].L;
    if (rows[i].delta_agent - rows[i - 1].delta_agent != dl)
      return {false, "agent overhead slope is not exactly 1"};
    if (rows[i].delta_ours_measured != rows[i - 1].delta_ours_measured)
      return {false, "in-stream overhead is not constant in L"};
  }
  return {true, "225/106 exact; slope(agent)=1, slope(ours)=0 over L=2^8..2^14"};
}

Outcome transparency_identity() {
  std::mt19937_64 rng(1006);
  const std::size_t n = 100000;
  std::vector<rs::Token> stream;
  stream.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    stream.emplace_back(1, static_cast<char>('a' + rng() % 16));

  const rs::RenderResult res = rs::render(stream, kSents);
  if (res.buffer != stream) return {false, "render is not the identity"};
  if (res.events.size() != n) return {false, "append event count mismatch"};
  for (const auto& ev : res.events)
    if (ev.kind != rs::RenderEvent::Kind::append) return {false, "non-append event"};

  rs::ScriptedPolicy policy(stream);
  const rs::SessionResult session = rs::decode_session(policy, kSents, {}, true, 0);
  if (session.cost.measured_output != n) return {false, "measured_output mismatch"};
  if (session.cost.measured_overhead != 0) return {false, "nonzero overhead"};
  return {true, "100000-token stream renders to itself, one append per token"};
}

Outcome episode_length_formula() {
  std::mt19937_64 rng(1007);
  for (int iter = 0; iter < 200; ++iter) {
    rs::Trajectory traj;
    std::size_t expected = 0;
    const int items = static_cast<int>(rng() % 20);
    for (int i = 0; i < items; ++i) {
      if (rng() % 4 == 0) {
        rs::RevisionEpisode ep;
        const std::size_t slen = 1 + rng() % 5;
        const std::size_t plen = rng() % 5;
        for (std::size_t k = 0; k < slen; ++k)
          ep.scope.emplace_back(1, static_cast<char>('a' + rng() % 6));
        for (std::size_t k = 0; k < plen; ++k)
          ep.patch.emplace_back(1, static_cast<char>('a' + rng() % 6));
        expected += slen + plen + 5;
        traj.items.emplace_back(std::move(ep));
      } else {
        traj.items.emplace_back(rs::Token(1, static_cast<char>('a' + rng() % 6)));
        expected += 1;
      }
    }
    if (rs::serialize(traj, kSents).size() != expected)
      return {false, "length formula violated at trajectory " + std::to_string(iter)};
  }
  return {true, "200/200 trajectories match #code + sum(|s|+|s'|+5)"};
}

Outcome semantic_init_reference() {
  {
    const rs::EmbeddingInitSpec spec{{{1.0, 0.0}, {0.0, 1.0}}, {}};
    const auto v = rs::semantic_init(spec);
    if (v[0] != 0.5 || v[1] != 0.5) return {false, "two-basis case not exactly [0.5, 0.5]"};
  }
  std::mt19937_64 rng(1008);
  std::uniform_real_distribution<double> val(-8.0, 8.0);
  std::uniform_real_distribution<double> wval(0.05, 4.0);
  for (int iter = 0; iter < 100; ++iter) {
    const std::size_t dim = 1 + rng() % 8;
    const std::size_t count = 1 + rng() % 12;
    rs::EmbeddingInitSpec spec;
    for (std::size_t i = 0; i < count; ++i) {
      std::vector<double> v(dim);
      for (double& x : v) x = val(rng);
      spec.description_vectors.push_back(std::move(v));
      spec.weights.push_back(wval(rng));
    }
    const auto got = rs::semantic_init(spec);

    // reference in extended precision
    long double z = 0.0L;
    for (double w : spec.weights) z += static_cast<long double>(w);
    for (std::size_t d = 0; d < dim; ++d) {
      long double acc = 0.0L;
      for (std::size_t i = 0; i < count; ++i)
        acc += static_cast<long double>(spec.weights[i]) *
               static_cast<long double>(spec.description_vectors[i][d]);
      const long double ref = acc / z;
      const long double denom = std::max<long double>(1.0L, std::fabs(ref));
      if (std::fabs(static_cast<long double>(got[d]) - ref) / denom > 1e-12L)
        return {false, "relative error above 1e-12 at spec " + std::to_string(iter)};
    }
  }
  return {true, "100/100 random specs within 1e-12 of the extended-precision reference"};
}

Outcome stability_matrix_cells() {
  const std::string good = "int f(){return 0;}";
  const std::string bad = "int f(){";
  const std::vector<std::pair<std::string, std::string>> fixtures = {
      {good, good}, {good, bad}, {bad, good}, {bad, bad}};
  const rs::StabilityCounts c = rs::stability_matrix(fixtures, rs::WellformedChecker::builtin());
  if (c.stable != 1 || c.regressed != 1 || c.fixed != 1 || c.stable_fail != 1)
    return {false, "fixtures did not land one per cell"};

  std::mt19937_64 rng(1009);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<std::pair<std::string, std::string>> pairs;
    const std::size_t n = rng() % 32;
    for (std::size_t i = 0; i < n; ++i) {
      auto text = [&] { return (rng() % 2) ? std::string("f(a);") : std::string("f(a;"); };
      pairs.emplace_back(text(), text());
    }
    if (rs::stability_matrix(pairs, rs::WellformedChecker::builtin()).total() != n)
      return {false, "totals drifted from the input count"};
  }
  return {true, "one count per cell; totals equal input on 100 random sets"};
}

struct CliRun {
  int exit_code = -1;
  std::string out;
};

CliRun run_cli(const std::string& cli, const std::string& args, const fs::path& out_file) {
  const std::string cmd =
      "'" + cli + "' " + args + " > '" + out_file.string() + "' 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  std::ifstream in(out_file, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism() {
  const char* cli = std::getenv("REVSTREAM_CLI");
  if (!cli) return {false, "REVSTREAM_CLI not set"};
  const fs::path dir =
      fs::temp_directory_path() / ("revstream-accept-" + std::to_string(::getpid()));
  fs::create_directories(dir);

  const auto pairs = make_synthetic_pairs(1010, 200);
  const fs::path corpus = dir / "pairs.jsonl";
  {
    std::ofstream out(corpus, std::ios::binary);
    for (const SyntheticPair& sp : pairs) out << rs::pair_to_json(sp.pair).dump() << '\n';
  }

  const std::string build_args = "build-data --pairs '" + corpus.string() +
                                 "' --profile word --seed 424242 --latency-k 8 --tier both";
  const fs::path out1 = dir / "r1.jsonl";
  const fs::path out2 = dir / "r2.jsonl";
  const CliRun b1 = run_cli(cli, build_args + " --out '" + out1.string() + "'", dir / "s1.json");
  const CliRun b2 = run_cli(cli, build_args + " --out '" + out2.string() + "'", dir / "s2.json");
  if (b1.exit_code != 0 || b2.exit_code != 0)
    return {false, "build-data exited nonzero"};
  if (slurp(out1) != slurp(out2) || slurp(out1).empty())
    return {false, "build-data outputs differ between runs"};
  if (b1.out != b2.out) return {false, "build-data summaries differ between runs"};

  const std::string sim_args =
      "simulate --policy stochastic --seed 777 --steps 200 --bias 0.5 --mask on --L 64";
  const CliRun s1 = run_cli(cli, sim_args, dir / "sim1.json");
  const CliRun s2 = run_cli(cli, sim_args, dir / "sim2.json");
  if (s1.exit_code != 0 || s2.exit_code != 0) return {false, "simulate exited nonzero"};
  if (s1.out != s2.out || s1.out.empty()) return {false, "simulate outputs differ between runs"};

  std::error_code ec;
  fs::remove_all(dir, ec);
  return {true, "build-data (200 pairs) and simulate byte-identical across two runs"};
}

Outcome desk_scale_performance() {
  std::mt19937_64 rng(1011);
  std::vector<rs::Token> buffer;
  buffer.reserve(100000);
  for (std::size_t i = 0; i < 100000; ++i)
    buffer.push_back("t" + std::to_string(rng() % 64));

  const auto t0 = std::chrono::steady_clock::now();
  const auto base = rs::open_constraint(buffer, rs::ConstraintBackend::substring_index);
  const auto t1 = std::chrono::steady_clock::now();

  std::size_t advances = 0;
  for (int trial = 0; trial < 100; ++trial) {
    rs::ConstraintState st = base;
    for (int step = 0; step < 256; ++step) {
      const rs::ValidSet v = st.valid_set();
      if (v.continuations.empty()) break;
      st = st.advance(v.continuations[rng() % v.continuations.size()]);
      ++advances;
    }
    if (st.span_len() > 0) st.close();
  }
  const auto t2 = std::chrono::steady_clock::now();

  const double build_s = std::chrono::duration<double>(t1 - t0).count();
  const double walk_s = std::chrono::duration<double>(t2 - t1).count();
  const double rate = static_cast<double>(advances) / std::max(walk_s, 1e-9);
  if (rate < 1000.0)
    return {false, "advance rate " + std::to_string(rate) + "/s below 1000/s"};
  char note[160];
  std::snprintf(note, sizeof(note),
                "%zu masked advances at %.0f/s on a 100000-token buffer (index build %.2fs)",
                advances, rate, build_s);
  return {true, note};
}

}  // namespace

int main() {
  using Criterion = std::pair<const char*, std::function<Outcome()>>;
  const std::vector<Criterion> criteria = {
      {"mask-oracle-equivalence", mask_oracle_equivalence},
      {"substring-soundness-completeness", substring_soundness_completeness},
      {"rightmost-splice-law", rightmost_splice_law},
      {"forge-round-trip", forge_round_trip},
      {"cost-closed-forms", cost_closed_forms},
      {"transparency-identity", transparency_identity},
      {"episode-length-formula", episode_length_formula},
      {"semantic-init-reference", semantic_init_reference},
      {"stability-matrix-cells", stability_matrix_cells},
      {"cli-determinism", cli_determinism},
      {"desk-scale-performance", desk_scale_performance},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %2zu %-34s %s (%.2fs)\n", outcome.pass ? "PASS" : "FAIL", i + 1,
                criteria[i].first, outcome.note.c_str(), secs);
    if (!outcome.pass) ++failures;
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
