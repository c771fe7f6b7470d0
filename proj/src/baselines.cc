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

#include "ttscale/baselines.h"

#include <chrono>
#include <cmath>
#include <map>

#include "ttscale/constrained.h"
#include "ttscale/decoder.h"
#include "ttscale/evalkit.h"
#include "ttscale/random.h"

namespace ttscale {
namespace {

constexpr std::string_view kSelectorBody =
    "Different people answered this question in different ways. Select the "
    "best response from these candidate answers:";
constexpr std::string_view kSelectorTail =
    "Just return the index of the best response. Return an integer between 0 "
    "and ";
constexpr std::string_view kSynthesizerBody =
    "Different people answered this question in different ways. Combine these "
    "responses into a single, coherent and accurate answer:";
constexpr std::string_view kSynthesizerTail = "Just return the final answer.";

std::string Render(std::string_view question, std::string_view body,
                   const std::vector<std::string>& candidates,
                   std::string_view tail) {
  std::string out = "\"";
  out += question;
  out += "\"\n\n";
  out += body;
  out += "\n\n";
  out += RenderCandidates(candidates);
  out += "\n\n";
  out += tail;
  return out;
}

}  // namespace

std::string Strip(std::string_view s) {
  const auto is_space = [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
  };
  size_t b = 0, e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

GenerationTrace TemperatureSample(Generator& g, const AugmentedInput& input,
                                  double temperature,
                                  const GenerationConfig& cfg,
                                  std::uint64_t seed) {
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "temperature must be > 0");
  }
  cfg.Validate();
  const auto start = std::chrono::steady_clock::now();
  SeededRng rng(seed);
  GenerationTrace trace;
  while (static_cast<int>(trace.tokens.size()) < cfg.max_tokens) {
    const TokenDistribution p = g.Step(input, trace.tokens);
    // p^(1/T) relative to the mode, so tiny temperatures stay finite.
    const double log_max = std::log(p[p.Argmax()]);
    std::vector<double> w(static_cast<size_t>(p.size()), 0.0);
    double total = 0.0;
    for (int v = 0; v < p.size(); ++v) {
      if (p[v] <= 0.0) continue;
      w[static_cast<size_t>(v)] = std::exp((std::log(p[v]) - log_max) / temperature);
      total += w[static_cast<size_t>(v)];
    }
    double u = rng.Uniform01() * total;
    TokenId pick = p.Argmax();
    for (int v = 0; v < p.size(); ++v) {
      if (w[static_cast<size_t>(v)] <= 0.0) continue;
      pick = v;
      u -= w[static_cast<size_t>(v)];
      if (u < 0.0) break;
    }
    trace.tokens.push_back(pick);
    trace.token_logprobs.push_back(std::log(p[pick]));
    if (cfg.record_distributions) {
      trace.per_step_distributions.push_back({p});
      trace.aggregated_distributions.push_back(p);
    }
    if (pick == cfg.eos_token) break;
  }
  trace.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return trace;
}

std::string SelfConsistency(const std::vector<std::string>& answers) {
  if (answers.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no answers to vote on");
  }
  std::map<std::string, std::pair<int, size_t>> tally;  // count, first index
  for (size_t i = 0; i < answers.size(); ++i) {
    auto [it, inserted] = tally.emplace(NormalizeText(answers[i]), std::pair{0, i});
    ++it->second.first;
  }
  const std::string* best = nullptr;
  std::pair<int, size_t> best_key{0, 0};
  for (const auto& [text, key] : tally) {
    if (best == nullptr || key.first > best_key.first ||
        (key.first == best_key.first && key.second < best_key.second)) {
      best = &text;
      best_key = key;
    }
  }
  return *best;
}

std::size_t SampleAndRankIndex(const std::vector<RankedCandidate>& candidates) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidates to rank");
  }
  std::size_t best = 0;
  double best_score = -INFINITY;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].token_logprobs.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "candidate without log-probs");
    }
    double score = 0.0;
    for (double lp : candidates[i].token_logprobs) score += lp;
    if (score > best_score) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::string SampleAndRank(const std::vector<RankedCandidate>& candidates) {
  return candidates[SampleAndRankIndex(candidates)].text;
}

std::string RenderCandidates(const std::vector<std::string>& candidates) {
  std::string out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(i) + ": " + candidates[i];
  }
  return out;
}

std::string RenderSelectorPrompt(std::string_view question,
                                 const std::vector<std::string>& candidates) {
  const std::string tail = std::string(kSelectorTail) +
                           std::to_string(candidates.empty() ? 0 : candidates.size() - 1) +
                           ".";
  return Render(question, kSelectorBody, candidates, tail);
}

std::string RenderSynthesizerPrompt(std::string_view question,
                                    const std::vector<std::string>& candidates) {
  return Render(question, kSynthesizerBody, candidates, kSynthesizerTail);
}

int SelfSelect(Generator& g, const AugmentedInput& question,
               const std::vector<std::string>& candidates, std::uint64_t seed) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidates to select from");
  }
  if (candidates.size() == 1) return 0;
  const IntegerRangeAutomaton range(static_cast<std::int64_t>(candidates.size()) - 1);
  const TokenConstraint constraint(range, g.vocabulary());
  AugmentedInput prompt = question;
  prompt.prompt = RenderSelectorPrompt(question.prompt, candidates);
  ConstrainedOptions options;
  options.max_tokens = 8;
  options.seed = seed;
  return std::stoi(ConstrainedDecode(g, prompt, constraint, options).text);
}

std::string SelfSynthesize(Generator& g, const AugmentedInput& question,
                           const std::vector<std::string>& candidates,
                           const GenerationConfig& cfg) {
  if (candidates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no candidates to synthesize");
  }
  AugmentedInput prompt = question;
  prompt.prompt = RenderSynthesizerPrompt(question.prompt, candidates);
  const GenerationTrace trace = GreedyDecode(g, prompt, cfg);
  return Strip(g.vocabulary().Decode(trace.tokens));
}

}  // namespace ttscale
