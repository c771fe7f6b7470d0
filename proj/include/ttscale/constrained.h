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

#ifndef TTSCALE_CONSTRAINED_H_
#define TTSCALE_CONSTRAINED_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttscale/generator.h"

namespace ttscale {

// Character-level automaton over a finite state set. States are opaque
// 64-bit codes.
class CharAutomaton {
 public:
  virtual ~CharAutomaton() = default;
  virtual std::uint64_t Start() const = 0;
  // nullopt when `c` cannot follow in state `s`.
  virtual std::optional<std::uint64_t> Next(std::uint64_t s, char c) const = 0;
  virtual bool Accepting(std::uint64_t s) const = 0;
};

// Decimal integers in [0, max_value] without leading zeros.
class IntegerRangeAutomaton final : public CharAutomaton {
 public:
  explicit IntegerRangeAutomaton(std::int64_t max_value);
  std::uint64_t Start() const override { return 0; }
  std::optional<std::uint64_t> Next(std::uint64_t s, char c) const override;
  bool Accepting(std::uint64_t s) const override { return s != 0; }

 private:
  std::int64_t max_value_;
};

// Canonical {"paraphrases": ["a", "b", ...]} with exactly `count` non-empty
// strings, ", " separators and simple backslash escapes.
class ParaphraseJsonAutomaton final : public CharAutomaton {
 public:
  explicit ParaphraseJsonAutomaton(int count);
  std::uint64_t Start() const override;
  std::optional<std::uint64_t> Next(std::uint64_t s, char c) const override;
  bool Accepting(std::uint64_t s) const override;

 private:
  int count_;
};

// Lifts a CharAutomaton to the token level for one vocabulary.
//
// All states reachable by whole tokens are enumerated up front, so a token
// is offered only when the resulting state can still reach acceptance.
// Throws CONSTRAINT_UNSATISFIABLE when no accepted string is expressible.
class TokenConstraint {
 public:
  TokenConstraint(const CharAutomaton& automaton, const Vocabulary& vocab);

  int start() const { return 0; }
  // Allowed-token mask for `state`; EOS is allowed only on acceptance.
  const std::vector<bool>& Allowed(int state) const { return allowed_[state]; }
  int Advance(int state, TokenId token) const;
  bool Accepting(int state) const { return accepting_[state]; }
  int num_states() const { return static_cast<int>(accepting_.size()); }

 private:
  TokenId eos_;
  std::vector<std::vector<int>> next_;  // -1 when rejected
  std::vector<bool> accepting_;
  std::vector<std::vector<bool>> allowed_;
};

struct ConstrainedOptions {
  int max_tokens = 64;
  // 0 decodes greedily; otherwise samples allowed tokens with this
  // temperature from `seed`.
  double temperature = 0.0;
  std::uint64_t seed = 0;
};

struct ConstrainedResult {
  TokenSequence tokens;
  std::string text;
};

// Decodes `input` so that the output text is accepted by `constraint`.
// CONSTRAINT_UNSATISFIABLE if max_tokens runs out before acceptance.
ConstrainedResult ConstrainedDecode(Generator& g, const AugmentedInput& input,
                                    const TokenConstraint& constraint,
                                    const ConstrainedOptions& options);

}  // namespace ttscale

#endif  // TTSCALE_CONSTRAINED_H_
