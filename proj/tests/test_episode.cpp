#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "revstream/episode.hpp"

using namespace revstream;

namespace {

const SentinelSet kSents;

Trajectory make_trajectory(std::vector<TrajectoryItem> items) {
  Trajectory t;
  t.items = std::move(items);
  return t;
}

Trajectory random_trajectory(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> item_count(0, 12);
  std::uniform_int_distribution<int> kind(0, 3);
  std::uniform_int_distribution<int> span_len(1, 4);
  std::uniform_int_distribution<int> patch_len(0, 4);
  std::uniform_int_distribution<int> letter(0, 5);
  auto tok = [&] { return Token(1, static_cast<char>('a' + letter(rng))); };

  Trajectory t;
  const int n = item_count(rng);
  for (int i = 0; i < n; ++i) {
    if (kind(rng) == 0) {
      RevisionEpisode ep;
      const int s = span_len(rng);
      for (int k = 0; k < s; ++k) ep.scope.push_back(tok());
      const int p = patch_len(rng);
      for (int k = 0; k < p; ++k) ep.patch.push_back(tok());
      t.items.emplace_back(std::move(ep));
    } else {
      t.items.emplace_back(tok());
    }
  }
  return t;
}

}  // namespace

TEST_CASE("serialize is the identity on pure code") {
  const auto t = make_trajectory({Token("a"), Token("b"), Token("c")});
  REQUIRE(serialize(t, kSents) == std::vector<Token>{"a", "b", "c"});
}

TEST_CASE("serialize expands an episode into the sentinel frame") {
  const auto t =
      make_trajectory({Token("a"), Token("b"), RevisionEpisode{{"a", "b"}, {"Z"}}});
  const std::vector<Token> expected = {"a",       "b",       "<|backtracking|>",
                                       "<|OLD|>", "a",       "b",
                                       "<|/OLD|>", "<|NEW|>", "Z",
                                       "<|/NEW|>"};
  REQUIRE(serialize(t, kSents) == expected);
}

TEST_CASE("serialized length follows the episode formula") {
  const auto t = make_trajectory({RevisionEpisode{{"x"}, {}}});
  REQUIRE(serialize(t, kSents).size() == 6);  // 1 + 0 + 5

  std::mt19937_64 rng(3);
  for (int i = 0; i < 300; ++i) {
    const Trajectory traj = random_trajectory(rng);
    std::size_t expected = traj.code_token_count();
    for (const auto& item : traj.items)
      if (const auto* ep = std::get_if<RevisionEpisode>(&item))
        expected += ep->scope.size() + ep->patch.size() + 5;
    REQUIRE(serialize(traj, kSents).size() == expected);
  }
}

TEST_CASE("parse inverts serialize") {
  const auto t =
      make_trajectory({Token("a"), Token("b"), RevisionEpisode{{"a", "b"}, {"Z"}}});
  REQUIRE(parse(serialize(t, kSents), kSents) == t);

  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    const Trajectory traj = random_trajectory(rng);
    REQUIRE(parse(serialize(traj, kSents), kSents) == traj);
  }
}

TEST_CASE("strict parse rejects an unterminated episode") {
  const std::vector<Token> stream = {"a", kSents.trigger, kSents.scope_open, "a"};
  try {
    parse(stream, kSents, ParseMode::strict);
    FAIL("expected UnterminatedEpisode");
  } catch (const Error& e) {
    REQUIRE(e.kind() == ErrorKind::unterminated_episode);
  }
}

TEST_CASE("lenient parse drops a trailing unterminated episode") {
  const std::vector<Token> stream = {"a", kSents.trigger, kSents.scope_open, "a"};
  const Trajectory t = parse(stream, kSents, ParseMode::lenient);
  REQUIRE(t == make_trajectory({Token("a")}));
}

TEST_CASE("parse classifies grammar violations") {
  auto kind_of = [](const std::vector<Token>& stream) {
    try {
      parse(stream, kSents, ParseMode::strict);
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::io_error;
  };

  REQUIRE(kind_of({"a", kSents.scope_close}) == ErrorKind::sentinel_out_of_context);
  REQUIRE(kind_of({kSents.trigger, kSents.scope_open, "x", kSents.trigger}) ==
          ErrorKind::nested_episode);
  REQUIRE(kind_of({kSents.trigger, kSents.scope_open, kSents.scope_close}) ==
          ErrorKind::empty_scope);
  REQUIRE(kind_of({kSents.trigger, "x"}) == ErrorKind::sentinel_out_of_context);
}

TEST_CASE("parse errors carry the offending token index") {
  const std::vector<Token> stream = {"a", "b", kSents.patch_close};
  try {
    parse(stream, kSents, ParseMode::strict);
    FAIL("expected an error");
  } catch (const Error& e) {
    REQUIRE(e.token_index() == 2);
  }
}

TEST_CASE("lenient parse is prefix-monotone") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    const Trajectory traj = random_trajectory(rng);
    const std::vector<Token> stream = serialize(traj, kSents);
    Trajectory prev;
    for (std::size_t cut = 0; cut <= stream.size(); ++cut) {
      const Trajectory now =
          parse(std::span(stream).first(cut), kSents, ParseMode::lenient);
      REQUIRE(now.items.size() >= prev.items.size());
      for (std::size_t k = 0; k < prev.items.size(); ++k)
        REQUIRE(now.items[k] == prev.items[k]);
      prev = now;
    }
  }
}

TEST_CASE("alias spellings parse as sentinels but are never emitted") {
  const std::vector<Token> stream = {"x", kSents.trigger, "<scope>", "x",
                                     "</scope>", "<patch>", "y", "</patch>"};
  const Trajectory t = parse(stream, kSents);
  REQUIRE(t == make_trajectory({Token("x"), RevisionEpisode{{"x"}, {"y"}}}));
  const auto reserialized = serialize(t, kSents);
  REQUIRE(reserialized[2] == "<|OLD|>");
}

TEST_CASE("serialize rejects invariant-violating trajectories") {
  REQUIRE_THROWS_AS(serialize(make_trajectory({RevisionEpisode{{}, {"x"}}}), kSents), Error);
  REQUIRE_THROWS_AS(serialize(make_trajectory({Token("<|OLD|>")}), kSents), Error);
  REQUIRE_THROWS_AS(
      serialize(make_trajectory({RevisionEpisode{{"a", kSents.trigger}, {}}}), kSents), Error);
}

TEST_CASE("trajectory text round-trips through the text format") {
  const auto t = make_trajectory(
      {Token("int"), Token(" "), Token("x;"), RevisionEpisode{{"x;"}, {"y", " ", ";"}}});
  const std::string text = tokens_to_text(serialize(t, kSents));
  const auto back = text_to_tokens(text, kSents, TokenizerProfile::word);
  REQUIRE(parse(back, kSents) == t);
}

TEST_CASE("text reader recognizes sentinels glued to code") {
  const auto toks =
      text_to_tokens("ab<|backtracking|><|OLD|>b<|/OLD|><|NEW|><|/NEW|> c", kSents,
                     TokenizerProfile::word);
  const Trajectory t = parse(toks, kSents);
  REQUIRE(t.episode_count() == 1);
  REQUIRE(t.code_token_count() == 3);  // "ab", " ", "c"
}
