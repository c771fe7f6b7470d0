// Copyright 2026 The ttscale Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ttscale/constrained.h"

#include <cmath>
#include <deque>
#include <string_view>

#include "ttscale/random.h"

namespace ttscale {
namespace {

constexpr std::string_view kHead = "{\"paraphrases\": [\"";
constexpr std::string_view kSeparator = ", \"";
constexpr std::string_view kTail = "]}";

enum Phase : std::uint64_t { kInHead, kInString, kInSeparator, kInTail, kDone };

// Packs (phase, index, pos, flags) into one state code.
std::uint64_t Pack(Phase phase, std::uint64_t index, std::uint64_t pos,
                   std::uint64_t flags = 0) {
  return phase | (index << 8) | (pos << 24) | (flags << 40);
}
Phase PhaseOf(std::uint64_t s) { return static_cast<Phase>(s & 0xff); }
std::uint64_t IndexOf(std::uint64_t s) { return (s >> 8) & 0xffff; }
std::uint64_t PosOf(std::uint64_t s) { return (s >> 24) & 0xffff; }
std::uint64_t FlagsOf(std::uint64_t s) { return s >> 40; }

constexpr std::uint64_t kNonEmpty = 1;
constexpr std::uint64_t kEscape = 2;

}  // namespace

IntegerRangeAutomaton::IntegerRangeAutomaton(std::int64_t max_value)
    : max_value_(max_value) {}

// State 0 is the empty string; state v + 1 means the digits typed so far
// spell v.
std::optional<std::uint64_t> IntegerRangeAutomaton::Next(std::uint64_t s,
                                                         char c) const {
  if (c < '0' || c > '9' || max_value_ < 0) return std::nullopt;
  const std::int64_t digit = c - '0';
  if (s == 0) {
    if (digit > max_value_) return std::nullopt;
    return static_cast<std::uint64_t>(digit) + 1;
  }
  const std::int64_t value = static_cast<std::int64_t>(s) - 1;
  if (value == 0) return std::nullopt;  // no leading zeros
  if (value > (max_value_ - digit) / 10) return std::nullopt;
  return static_cast<std::uint64_t>(value * 10 + digit) + 1;
}

ParaphraseJsonAutomaton::ParaphraseJsonAutomaton(int count) : count_(count) {
  if (count < 1) {
    throw Error(ErrorCode::kInvalidArgument, "paraphrase count must be >= 1");
  }
}

std::uint64_t ParaphraseJsonAutomaton::Start() const {
  return Pack(kInHead, 0, 0);
}

bool ParaphraseJsonAutomaton::Accepting(std::uint64_t s) const {
  return PhaseOf(s) == kDone;
}

std::optional<std::uint64_t> ParaphraseJsonAutomaton::Next(std::uint64_t s,
                                                           char c) const {
  const std::uint64_t index = IndexOf(s);
  const std::uint64_t pos = PosOf(s);
  auto literal = [&](std::string_view lit, Phase phase,
                     std::uint64_t done) -> std::optional<std::uint64_t> {
    if (lit[pos] != c) return std::nullopt;
    if (pos + 1 == lit.size()) return done;
    return Pack(phase, index, pos + 1);
  };
  switch (PhaseOf(s)) {
    case kInHead:
      return literal(kHead, kInHead, Pack(kInString, 0, 0));
    case kInSeparator:
      return literal(kSeparator, kInSeparator, Pack(kInString, index, 0));
    case kInTail:
      return literal(kTail, kInTail, Pack(kDone, 0, 0));
    case kInString: {
      const std::uint64_t flags = FlagsOf(s);
      if (static_cast<unsigned char>(c) < 0x20) return std::nullopt;
      if (flags & kEscape) {
        if (std::string_view("\"\\/bnrtf").find(c) == std::string_view::npos) {
          return std::nullopt;
        }
        return Pack(kInString, index, 0, kNonEmpty);
      }
      if (c == '\\') return Pack(kInString, index, 0, kNonEmpty | kEscape);
      if (c == '"') {
        if (!(flags & kNonEmpty)) return std::nullopt;
        if (index + 1 < static_cast<std::uint64_t>(count_)) {
          return Pack(kInSeparator, index + 1, 0);
        }
        return Pack(kInTail, 0, 0);
      }
      return Pack(kInString, index, 0, kNonEmpty);
    }
    case kDone:
      return std::nullopt;
  }
  return std::nullopt;
}

TokenConstraint::TokenConstraint(const CharAutomaton& automaton,
                                 const Vocabulary& vocab)
    : eos_(vocab.eos()) {
  const int v = vocab.size();
  std::unordered_map<std::uint64_t, int> ids;
  std::vector<std::uint64_t> codes;
  std::deque<int> frontier;
  auto intern = [&](std::uint64_t code) {
    auto [it, inserted] = ids.emplace(code, static_cast<int>(codes.size()));
    if (inserted) {
      codes.push_back(code);
      next_.emplace_back(static_cast<size_t>(v), -1);
      accepting_.push_back(automaton.Accepting(code));
      frontier.push_back(it->second);
    }
    return it->second;
  };
  intern(automaton.Start());
  while (!frontier.empty()) {
    const int id = frontier.front();
    frontier.pop_front();
    for (TokenId t = 0; t < v; ++t) {
      const std::string& piece = vocab.text(t);
      if (t == eos_ || piece.empty()) continue;
      std::optional<std::uint64_t> state = codes[static_cast<size_t>(id)];
      for (char c : piece) {
        state = automaton.Next(*state, c);
        if (!state) break;
      }
      if (state) next_[static_cast<size_t>(id)][static_cast<size_t>(t)] = intern(*state);
    }
  }

  const size_t n = codes.size();
  std::vector<bool> live(accepting_.begin(), accepting_.end());
  for (bool changed = true; changed;) {
    changed = false;
    for (size_t s = 0; s < n; ++s) {
      if (live[s]) continue;
      for (int to : next_[s]) {
        if (to >= 0 && live[static_cast<size_t>(to)]) {
          live[s] = true;
          changed = true;
          break;
        }
      }
    }
  }
  if (!live[0]) {
    throw Error(ErrorCode::kConstraintUnsatisfiable,
                "vocabulary cannot express any accepted output");
  }
  allowed_.assign(n, std::vector<bool>(static_cast<size_t>(v), false));
  for (size_t s = 0; s < n; ++s) {
    for (size_t t = 0; t < static_cast<size_t>(v); ++t) {
      const int to = next_[s][t];
      allowed_[s][t] = to >= 0 && live[static_cast<size_t>(to)];
    }
    allowed_[s][static_cast<size_t>(eos_)] = accepting_[s];
  }
}

int TokenConstraint::Advance(int state, TokenId token) const {
  const int to = next_[static_cast<size_t>(state)][static_cast<size_t>(token)];
  if (to < 0) {
    throw Error(ErrorCode::kConstraintUnsatisfiable,
                "token " + std::to_string(token) + " violates the constraint");
  }
  return to;
}

ConstrainedResult ConstrainedDecode(Generator& g, const AugmentedInput& input,
                                    const TokenConstraint& constraint,
                                    const ConstrainedOptions& options) {
  const Vocabulary& vocab = g.vocabulary();
  SeededRng rng(options.seed);
  ConstrainedResult result;
  int state = constraint.start();
  for (int step = 0; step < options.max_tokens; ++step) {
    const std::vector<bool>& allowed = constraint.Allowed(state);
    const TokenDistribution p = g.Step(input, result.tokens);

    TokenId pick = -1;
    if (options.temperature <= 0.0) {
      double best = -1.0;
      for (TokenId t = 0; t < p.size(); ++t) {
        if (allowed[static_cast<size_t>(t)] && p[t] > best) {
          best = p[t];
          pick = t;
        }
      }
    } else {
      std::vector<double> w(static_cast<size_t>(p.size()), 0.0);
      double total = 0.0;
      for (TokenId t = 0; t < p.size(); ++t) {
        if (!allowed[static_cast<size_t>(t)]) continue;
        w[static_cast<size_t>(t)] =
            p[t] > 0.0 ? std::exp(std::log(p[t]) / options.temperature) : 0.0;
        total += w[static_cast<size_t>(t)];
      }
      if (total <= 0.0) {
        for (TokenId t = 0; t < p.size(); ++t) {
          w[static_cast<size_t>(t)] = allowed[static_cast<size_t>(t)] ? 1.0 : 0.0;
          total += w[static_cast<size_t>(t)];
        }
      }
      double u = rng.Uniform01() * total;
      for (TokenId t = 0; t < p.size(); ++t) {
        if (w[static_cast<size_t>(t)] <= 0.0) continue;
        pick = t;
        u -= w[static_cast<size_t>(t)];
        if (u < 0.0) break;
      }
    }
    if (pick < 0) {
      throw Error(ErrorCode::kConstraintUnsatisfiable, "no allowed token");
    }
    result.tokens.push_back(pick);
    if (pick == vocab.eos()) return result;
    state = constraint.Advance(state, pick);
    result.text += vocab.text(pick);
  }
  if (!constraint.Accepting(state)) {
    throw Error(ErrorCode::kConstraintUnsatisfiable,
                "max_tokens reached before the output was complete");
  }
  return result;
}

}  // namespace ttscale
