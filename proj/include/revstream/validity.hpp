#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "revstream/error.hpp"

namespace revstream {

struct ValidityVerdict {
  bool pass = false;
  std::string checker_id;
  std::string detail;
};

enum class StabilityLabel { stable, regressed, fixed, stable_fail };

inline StabilityLabel stability_label(bool pre_pass, bool post_pass) {
  if (pre_pass) return post_pass ? StabilityLabel::stable : StabilityLabel::regressed;
  return post_pass ? StabilityLabel::fixed : StabilityLabel::stable_fail;
}

inline const char* stability_label_name(StabilityLabel l) {
  switch (l) {
    case StabilityLabel::stable: return "stable";
    case StabilityLabel::regressed: return "regressed";
    case StabilityLabel::fixed: return "fixed";
    case StabilityLabel::stable_fail: return "stable_fail";
  }
  return "stable_fail";
}

struct StabilityCounts {
  std::size_t stable = 0;
  std::size_t regressed = 0;
  std::size_t fixed = 0;
  std::size_t stable_fail = 0;

  std::size_t total() const { return stable + regressed + fixed + stable_fail; }

  void add(StabilityLabel l) {
    switch (l) {
      case StabilityLabel::stable: ++stable; break;
      case StabilityLabel::regressed: ++regressed; break;
      case StabilityLabel::fixed: ++fixed; break;
      case StabilityLabel::stable_fail: ++stable_fail; break;
    }
  }
};

/// Bracket/quote balance scan: a deliberately weak but deterministic proxy
/// for syntactic well-formedness. Quotes toggle a string state, a backslash
/// inside a string escapes one character, brackets inside strings are
/// ignored.
inline ValidityVerdict check_balance(std::string_view text) {
  std::vector<char> stack;
  char quote = 0;
  bool escaped = false;
  for (char c : text) {
    if (quote) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    switch (c) {
      case '\'':
      case '"':
        quote = c;
        break;
      case '(':
      case '[':
      case '{':
        stack.push_back(c);
        break;
      case ')':
      case ']':
      case '}': {
        const char open = (c == ')') ? '(' : (c == ']') ? '[' : '{';
        if (stack.empty() || stack.back() != open)
          return {false, "builtin-balance", std::string("unmatched ") + c};
        stack.pop_back();
        break;
      }
      default: break;
    }
  }
  if (quote) return {false, "builtin-balance", "unterminated quote"};
  if (!stack.empty())
    return {false, "builtin-balance", std::string("unclosed ") + stack.back()};
  return {true, "builtin-balance", ""};
}

/// Runs `command` with the text on standard input; exit status 0 is a pass.
/// Shell statuses 126/127 (not executable / not found) surface as
/// ExternalCheckerUnavailable.
inline ValidityVerdict check_external(std::string_view text, const std::string& command) {
  namespace fs = std::filesystem;
  static std::atomic<unsigned> counter{0};
  const fs::path tmp = fs::temp_directory_path() /
                       ("revstream-check-" + std::to_string(::getpid()) + "-" +
                        std::to_string(counter.fetch_add(1)) + ".txt");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorKind::io_error, "cannot create " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
  }
  const std::string cmd = command + " < '" + tmp.string() + "'";
  const int rc = std::system(cmd.c_str());
  std::error_code ec;
  fs::remove(tmp, ec);
  if (rc == -1)
    throw Error(ErrorKind::external_checker_unavailable, "failed to launch: " + command);
  if (!WIFEXITED(rc))
    throw Error(ErrorKind::external_checker_unavailable, "checker terminated abnormally");
  const int code = WEXITSTATUS(rc);
  if (code == 126 || code == 127)
    throw Error(ErrorKind::external_checker_unavailable, command);
  return {code == 0, "external:" + command, "exit " + std::to_string(code)};
}

struct WellformedChecker {
  enum class Kind { builtin_balance, external } kind = Kind::builtin_balance;
  std::string command;

  static WellformedChecker builtin() { return {}; }
  static WellformedChecker external_cmd(std::string cmd) {
    return {Kind::external, std::move(cmd)};
  }
};

inline ValidityVerdict check_wellformed(std::string_view text, const WellformedChecker& checker) {
  if (checker.kind == WellformedChecker::Kind::builtin_balance) return check_balance(text);
  return check_external(text, checker.command);
}

/// Tallies pre/post verdicts into the four stability cells.
inline StabilityCounts stability_matrix(std::span<const std::pair<std::string, std::string>> pairs,
                                        const WellformedChecker& checker) {
  StabilityCounts counts;
  for (const auto& [pre, post] : pairs) {
    const bool pre_pass = check_wellformed(pre, checker).pass;
    const bool post_pass = check_wellformed(post, checker).pass;
    counts.add(stability_label(pre_pass, post_pass));
  }
  return counts;
}

}  // namespace revstream
