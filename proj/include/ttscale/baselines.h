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

#ifndef TTSCALE_BASELINES_H_
#define TTSCALE_BASELINES_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/generator.h"

namespace ttscale {

inline constexpr double kDefaultSamplingTemperature = 1.0;

// Autoregressive sampling from p^(1/T) (i.e. softmax(logits / T)) with the
// stopping rules of cfg. INVALID_ARGUMENT unless temperature > 0.
GenerationTrace TemperatureSample(Generator& g, const AugmentedInput& input,
                                  double temperature,
                                  const GenerationConfig& cfg,
                                  std::uint64_t seed);

// Most frequent normalized answer; the earliest one wins ties.
std::string SelfConsistency(const std::vector<std::string>& answers);

struct RankedCandidate {
  std::string text;
  std::vector<double> token_logprobs;
};

// Index of the candidate with the largest summed log-probability; the
// earliest one wins ties.
std::size_t SampleAndRankIndex(const std::vector<RankedCandidate>& candidates);
std::string SampleAndRank(const std::vector<RankedCandidate>& candidates);

// "0: first\n1: second" ...
std::string RenderCandidates(const std::vector<std::string>& candidates);
std::string RenderSelectorPrompt(std::string_view question,
                                 const std::vector<std::string>& candidates);
std::string RenderSynthesizerPrompt(std::string_view question,
                                    const std::vector<std::string>& candidates);

// Asks the generator for the best candidate index under an integer-range
// constraint, so the result is always in [0, |candidates|). A single
// candidate returns 0 without a model call.
int SelfSelect(Generator& g, const AugmentedInput& question,
               const std::vector<std::string>& candidates, std::uint64_t seed);

// Greedy free-form answer to the synthesizer prompt, whitespace-stripped.
std::string SelfSynthesize(Generator& g, const AugmentedInput& question,
                           const std::vector<std::string>& candidates,
                           const GenerationConfig& cfg);

// Strips leading and trailing whitespace.
std::string Strip(std::string_view s);

}  // namespace ttscale

#endif  // TTSCALE_BASELINES_H_
