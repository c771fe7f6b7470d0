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

#ifndef TTSCALE_GENERATOR_H_
#define TTSCALE_GENERATOR_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ttscale/core.h"

namespace ttscale {

class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> tokens, TokenId eos);

  int size() const { return static_cast<int>(tokens_.size()); }
  TokenId eos() const { return eos_; }
  const std::string& text(TokenId id) const;
  const std::vector<std::string>& tokens() const { return tokens_; }
  std::optional<TokenId> Find(std::string_view text) const;

  // Concatenates token texts, skipping EOS.
  std::string Decode(std::span<const TokenId> tokens) const;

 private:
  std::vector<std::string> tokens_;
  TokenId eos_ = 0;
};

struct Capabilities {
  bool hidden_states = false;
  bool trainable = false;
};

// Opaque copy of a generator's trainable state. A default-constructed
// snapshot is empty and cannot be restored.
class WeightSnapshot {
 public:
  WeightSnapshot() = default;
  WeightSnapshot(std::shared_ptr<const void> state, std::uint64_t owner)
      : state_(std::move(state)), owner_(owner) {}

  bool empty() const { return state_ == nullptr; }
  std::uint64_t owner() const { return owner_; }
  template <typename T>
  const T& as() const {
    return *static_cast<const T*>(state_.get());
  }

 private:
  std::shared_ptr<const void> state_;
  std::uint64_t owner_ = 0;
};

// Decoupled-weight-decay Adam update parameters for one optimizer step.
struct AdamWStep {
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Autoregressive generator contract: f_theta(image, prompt, prefix) -> p.
//
// Only Step() and the metadata accessors are mandatory. The hidden-state
// and training entry points throw UNSUPPORTED_CAPABILITY unless the
// implementation advertises the matching capability.
class Generator {
 public:
  virtual ~Generator() = default;

  virtual const Vocabulary& vocabulary() const = 0;
  int vocab_size() const { return vocabulary().size(); }
  virtual int num_layers() const = 0;
  virtual int hidden_dim() const { return 0; }
  virtual Capabilities capabilities() const = 0;
  // Maximum prefix length accepted by Step().
  virtual std::size_t context_limit() const { return 4096; }

  virtual TokenDistribution Step(const AugmentedInput& input,
                                 std::span<const TokenId> prefix) = 0;

  // Evaluates every input against the same prefix. The default runs the
  // queries one after another regardless of `mode`.
  virtual std::vector<TokenDistribution> StepBatch(
      std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
      ExecutionMode mode);

  virtual std::vector<double> StepHidden(const AugmentedInput& input,
                                         std::span<const TokenId> prefix,
                                         int layer);
  virtual std::vector<std::vector<double>> StepHiddenBatch(
      std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
      int layer, ExecutionMode mode);
  // Runs layers layer+1..L on `hidden` and returns the output distribution.
  virtual TokenDistribution ResumeFromHidden(std::span<const double> hidden,
                                             int layer);

  virtual WeightSnapshot CloneWeights();
  virtual void RestoreWeights(const WeightSnapshot& snapshot);

  virtual void ZeroGrad();
  // Adds scale * d(-log p(target | input))/d(params) into the gradient
  // buffers, teacher-forcing over every target position. Returns the
  // unscaled summed negative log-likelihood.
  virtual double AccumulateGradient(const AugmentedInput& input,
                                    std::span<const TokenId> target,
                                    double scale);
  virtual void ApplyAdamW(const AdamWStep& step);

 protected:
  void RequireHiddenStates() const;
  void RequireTrainable() const;
  void CheckPrefix(std::span<const TokenId> prefix) const;
};

// Log-probability of `target` under teacher forcing, summed over positions.
double SequenceLogLikelihood(Generator& g, const AugmentedInput& input,
                             std::span<const TokenId> target);

}  // namespace ttscale

#endif  // TTSCALE_GENERATOR_H_
