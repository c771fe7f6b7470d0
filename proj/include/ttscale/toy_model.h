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

#ifndef TTSCALE_TOY_MODEL_H_
#define TTSCALE_TOY_MODEL_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ttscale/generator.h"
#include "ttscale/optim.h"
#include "ttscale/serialization.h"

namespace ttscale {

// Stable 64-bit key over (prompt bytes, image fingerprint, prefix ids).
std::uint64_t ToyContextKey(std::string_view prompt,
                            std::optional<std::uint64_t> image_fingerprint,
                            std::span<const TokenId> prefix);
std::uint64_t ToyContextKey(const AugmentedInput& input,
                            std::span<const TokenId> prefix);

struct ToyEntry {
  std::string prompt;
  std::optional<std::uint64_t> image_fingerprint;
  TokenSequence prefix;
  std::vector<double> probs;
};

struct ToyModelSpec {
  std::vector<std::string> vocab;
  TokenId eos = 0;
  int num_layers = 4;
  // 0 selects vocab size + 8.
  int hidden_dim = 0;
  std::uint64_t layer_seed = 0;
  std::size_t context_limit = 4096;
  // Dense hidden_dim x hidden_dim products per layer and query. Zero keeps
  // queries as cheap table lookups; the overhead benchmark raises it.
  int work_per_layer = 0;
  bool trainable = true;
  std::vector<ToyEntry> entries;

  // Adds a transition-table row for (prompt, image, prefix).
  void Set(std::string_view prompt, const std::optional<Image>& image,
           TokenSequence prefix, std::vector<double> probs);
};

void to_json(Json& j, const ToyModelSpec& spec);
void from_json(const Json& j, ToyModelSpec& spec);

// Deterministic desk-scale generator.
//
// Each context maps to a logit row (log of the table probabilities, or all
// zeros for unseen contexts, i.e. the uniform fallback). The hidden state at
// layer l < L is an exact signed permutation / power-of-two scaling of the
// logits padded with context noise; at layer L the same map is applied to
// the output probabilities. Resuming inverts the map bit-exactly, so
// ResumeFromHidden(StepHidden(c, l), l) == Step(c) for every l. Training
// updates the logit rows with closed-form cross-entropy gradients.
class ToyModel final : public Generator {
 public:
  explicit ToyModel(ToyModelSpec spec);
  static std::unique_ptr<ToyModel> FromFile(const std::filesystem::path& path);

  const ToyModelSpec& spec() const { return spec_; }

  const Vocabulary& vocabulary() const override { return vocab_; }
  int num_layers() const override { return spec_.num_layers; }
  int hidden_dim() const override { return hidden_dim_; }
  Capabilities capabilities() const override {
    return {.hidden_states = true, .trainable = spec_.trainable};
  }
  std::size_t context_limit() const override { return spec_.context_limit; }

  TokenDistribution Step(const AugmentedInput& input,
                         std::span<const TokenId> prefix) override;
  std::vector<TokenDistribution> StepBatch(
      std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
      ExecutionMode mode) override;
  std::vector<double> StepHidden(const AugmentedInput& input,
                                 std::span<const TokenId> prefix,
                                 int layer) override;
  std::vector<std::vector<double>> StepHiddenBatch(
      std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
      int layer, ExecutionMode mode) override;
  TokenDistribution ResumeFromHidden(std::span<const double> hidden,
                                     int layer) override;

  WeightSnapshot CloneWeights() override;
  void RestoreWeights(const WeightSnapshot& snapshot) override;
  void ZeroGrad() override;
  double AccumulateGradient(const AugmentedInput& input,
                            std::span<const TokenId> target,
                            double scale) override;
  void ApplyAdamW(const AdamWStep& step) override;

  // Const evaluation paths; safe to call from several threads at once as
  // long as no training call runs concurrently.
  TokenDistribution Evaluate(const AugmentedInput& input,
                             std::span<const TokenId> prefix) const;
  std::vector<double> EvaluateHidden(const AugmentedInput& input,
                                     std::span<const TokenId> prefix,
                                     int layer) const;

 private:
  struct Params {
    std::unordered_map<std::uint64_t, std::vector<double>> logits;
    std::unordered_map<std::uint64_t, AdamMoments> moments;
    std::int64_t step = 0;
  };
  struct LayerMap {
    std::vector<int> position;  // slot of logit v in the hidden vector
    std::vector<double> sign;
    int exponent = 0;
  };

  std::vector<double> LogitsFor(std::uint64_t key) const;
  // Burns work_per_layer dense products per layer in [from, to) and returns
  // a checksum so the work is not elided.
  double SimulateLayers(std::uint64_t key, int from, int to) const;
  void CheckLayer(int layer) const;

  ToyModelSpec spec_;
  Vocabulary vocab_;
  int hidden_dim_ = 0;
  std::vector<LayerMap> layers_;
  std::vector<double> mixing_;  // hidden_dim x hidden_dim
  Params params_;
  std::unordered_map<std::uint64_t, std::vector<double>> grads_;
  std::uint64_t id_ = 0;
};

}  // namespace ttscale

#endif  // TTSCALE_TOY_MODEL_H_
