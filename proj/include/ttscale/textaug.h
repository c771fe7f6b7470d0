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

#ifndef TTSCALE_TEXTAUG_H_
#define TTSCALE_TEXTAUG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ttscale/generator.h"

namespace ttscale {

// Keys one step away from `c` on a staggered QWERTY grid with a digit row.
// Lowercase letters and digits only; empty for anything else.
std::string_view KeyboardNeighbors(char c);

// Replaces each ASCII letter or digit with probability `rate` by a random
// keyboard neighbour, keeping its case. Byte length is preserved.
std::string KeyboardError(std::string_view text, double rate, std::uint64_t seed);
// Inserts one space inside a random word of at least 4 characters.
std::string WordSplit(std::string_view text, std::uint64_t seed);
// Removes one random word (and its adjoining whitespace) when there are at
// least 3 words.
std::string WordDelete(std::string_view text, std::uint64_t seed);
// Swaps one random pair of adjacent sentences, leaving the separators put.
std::string SentenceReorder(std::string_view text, std::uint64_t seed);

// Sentences end at '.', '!' or '?' followed by whitespace; terminators stay
// with their sentence and surrounding whitespace is dropped.
std::vector<std::string> SplitSentences(std::string_view text);

enum class TextOp { kKeyboardError, kWordSplit, kWordDelete, kSentenceReorder };

struct ClassicalTextOptions {
  double inclusion_prob = 0.5;
  double keyboard_rate = 0.1;
};

struct ClassicalPlanStep {
  TextOp op;
  bool included;
  std::uint64_t seed;
};

// The seeded order and inclusion draws the pipeline will use.
std::vector<ClassicalPlanStep> PlanClassicalPipeline(
    std::uint64_t seed, const ClassicalTextOptions& options = {});

std::string ClassicalTextPipeline(std::string_view text, std::uint64_t seed,
                                  const ClassicalTextOptions& options = {});

// augmented + " In other words, " + original.
std::string EnforceConsistency(std::string_view augmented,
                               std::string_view original);

// The paraphrasing instruction with {n_aug} substituted, a newline, then
// the text to paraphrase.
std::string RenderParaphrasePrompt(std::string_view text, int n_aug);

// Strict parse of {"paraphrases": [n strings]}; nullopt on any deviation.
std::optional<std::vector<std::string>> ParseParaphrases(std::string_view raw,
                                                         int n);

// Source of raw paraphrase completions. `attempt` counts retries from 0.
class Paraphraser {
 public:
  virtual ~Paraphraser() = default;
  virtual std::string Complete(const std::string& prompt, int n,
                               int attempt) = 0;
};

// Paraphrases with a generator under a JSON-schema constraint: greedy on
// the first attempt, seeded sampling on retries.
class GeneratorParaphraser final : public Paraphraser {
 public:
  GeneratorParaphraser(Generator& g, std::uint64_t seed, int max_tokens = 512)
      : g_(g), seed_(seed), max_tokens_(max_tokens) {}
  std::string Complete(const std::string& prompt, int n, int attempt) override;

 private:
  Generator& g_;
  std::uint64_t seed_;
  int max_tokens_;
};

inline constexpr int kParaphraseAttempts = 3;

// Paraphrases each sentence n_aug times and combines sentence variants
// from the Cartesian product into n_aug full prompts.
std::vector<std::string> SelfParaphrase(Paraphraser& paraphraser,
                                        std::string_view prompt, int n_aug,
                                        std::uint64_t seed);
std::vector<std::string> SelfParaphrase(Generator& g, std::string_view prompt,
                                        int n_aug, std::uint64_t seed);

}  // namespace ttscale

#endif  // TTSCALE_TEXTAUG_H_
