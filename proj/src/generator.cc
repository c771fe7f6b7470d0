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

#include "ttscale/generator.h"

#include <cmath>

namespace ttscale {

Vocabulary::Vocabulary(std::vector<std::string> tokens, TokenId eos)
    : tokens_(std::move(tokens)), eos_(eos) {
  if (tokens_.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "vocabulary needs >= 2 tokens");
  }
  if (eos_ < 0 || eos_ >= size()) {
    throw Error(ErrorCode::kInvalidArgument, "eos token out of range");
  }
}

const std::string& Vocabulary::text(TokenId id) const {
  if (id < 0 || id >= size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "token id " + std::to_string(id) + " out of range");
  }
  return tokens_[static_cast<size_t>(id)];
}

std::optional<TokenId> Vocabulary::Find(std::string_view text) const {
  for (size_t i = 0; i < tokens_.size(); ++i) {
    if (tokens_[i] == text) return static_cast<TokenId>(i);
  }
  return std::nullopt;
}

std::string Vocabulary::Decode(std::span<const TokenId> tokens) const {
  std::string out;
  for (TokenId t : tokens) {
    if (t == eos_) continue;
    out += text(t);
  }
  return out;
}

std::vector<TokenDistribution> Generator::StepBatch(
    std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
    ExecutionMode /*mode*/) {
  std::vector<TokenDistribution> out;
  out.reserve(inputs.size());
  for (const AugmentedInput& input : inputs) out.push_back(Step(input, prefix));
  return out;
}

std::vector<double> Generator::StepHidden(const AugmentedInput&,
                                          std::span<const TokenId>, int) {
  RequireHiddenStates();
  throw Error(ErrorCode::kUnsupportedCapability, "StepHidden not implemented");
}

std::vector<std::vector<double>> Generator::StepHiddenBatch(
    std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
    int layer, ExecutionMode /*mode*/) {
  std::vector<std::vector<double>> out;
  out.reserve(inputs.size());
  for (const AugmentedInput& input : inputs) {
    out.push_back(StepHidden(input, prefix, layer));
  }
  return out;
}

TokenDistribution Generator::ResumeFromHidden(std::span<const double>, int) {
  RequireHiddenStates();
  throw Error(ErrorCode::kUnsupportedCapability,
              "ResumeFromHidden not implemented");
}

WeightSnapshot Generator::CloneWeights() {
  RequireTrainable();
  throw Error(ErrorCode::kUnsupportedCapability, "CloneWeights not implemented");
}

void Generator::RestoreWeights(const WeightSnapshot&) {
  RequireTrainable();
  throw Error(ErrorCode::kUnsupportedCapability,
              "RestoreWeights not implemented");
}

void Generator::ZeroGrad() { RequireTrainable(); }

double Generator::AccumulateGradient(const AugmentedInput&,
                                     std::span<const TokenId>, double) {
  RequireTrainable();
  throw Error(ErrorCode::kUnsupportedCapability,
              "AccumulateGradient not implemented");
}

void Generator::ApplyAdamW(const AdamWStep&) { RequireTrainable(); }

void Generator::RequireHiddenStates() const {
  if (!capabilities().hidden_states) {
    throw Error(ErrorCode::kUnsupportedCapability,
                "generator does not expose hidden states");
  }
}

void Generator::RequireTrainable() const {
  if (!capabilities().trainable) {
    throw Error(ErrorCode::kUnsupportedCapability,
                "generator is not trainable");
  }
}

void Generator::CheckPrefix(std::span<const TokenId> prefix) const {
  if (prefix.size() >= context_limit()) {
    throw Error(ErrorCode::kContextOverflow,
                "prefix of " + std::to_string(prefix.size()) +
                    " tokens exceeds the context limit");
  }
}

double SequenceLogLikelihood(Generator& g, const AugmentedInput& input,
                             std::span<const TokenId> target) {
  double total = 0.0;
  for (size_t j = 0; j < target.size(); ++j) {
    const TokenDistribution p = g.Step(input, target.first(j));
    total += std::log(p[target[j]]);
  }
  return total;
}

}  // namespace ttscale
