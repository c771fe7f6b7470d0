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

#ifndef TTSCALE_ADAPT_H_
#define TTSCALE_ADAPT_H_

#include <span>
#include <string>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/decoder.h"
#include "ttscale/generator.h"

namespace ttscale {

struct WeightOptConfig {
  double learning_rate = 1e-2;
  double weight_decay = 1e-4;
  int micro_steps = 20;
  double grad_clip_norm = 1.0;
  double entropy_eps = 1e-12;

  void Validate() const;
};

struct AdaptConfig {
  int pseudo_iterations = 3;
  int train_steps = 6;
  double learning_rate = 2e-6;
  int warmup_steps = 5;
  double weight_decay = 0.01;
  int batch_size = 64;
  int grad_accum = 2;

  void Validate() const;
};

// Entropy of sum_i softmax(w)_i * row_i, natural log with `eps` inside it.
double MarginalEntropy(std::span<const double> weights, const StepMatrix& m,
                       double eps = 1e-12);
// Analytic gradient of MarginalEntropy with respect to the raw weights.
std::vector<double> EntropyGradient(std::span<const double> weights,
                                    const StepMatrix& m, double eps = 1e-12);

// Mixture weights for one step: raw weights start at 1/N, take
// cfg.micro_steps clipped AdamW steps on the marginal entropy, and come back
// softmax-normalized. The rows are constant data.
std::vector<double> OptimizeStepWeights(const StepMatrix& m,
                                        const WeightOptConfig& cfg);
std::vector<std::vector<double>> OptimizeWeights(
    const std::vector<StepMatrix>& steps, const WeightOptConfig& cfg);

// TTAug decoding where every step mixes the final-layer rows with weights
// from OptimizeStepWeights and takes the argmax.
GenerationTrace TtadaptWeightsGenerate(Generator& g,
                                       std::span<const AugmentedInput> inputs,
                                       const GenerationConfig& gen_cfg,
                                       const WeightOptConfig& weight_cfg);

// cfg.train_steps of cross-entropy fine-tuning on (inputs[k mod N] ->
// target) pairs. Each step accumulates batch_size * grad_accum examples and
// applies one AdamW update on the cosine-with-warmup schedule.
void FineTuneOnPseudolabel(Generator& g, std::span<const AugmentedInput> inputs,
                           std::span<const TokenId> target,
                           const AdaptConfig& cfg);

// Pseudolabel self-training. Every iteration decodes an average-aggregated
// TTAug consensus; all but the last then fine-tune on it. The generator's
// weights are restored before returning, also on error.
// UNSUPPORTED_CAPABILITY unless the generator is trainable.
GenerationTrace TtadaptParamsGenerate(Generator& g,
                                      std::span<const AugmentedInput> inputs,
                                      const GenerationConfig& gen_cfg,
                                      const AdaptConfig& adapt_cfg);
std::string TtadaptAnswer(Generator& g, std::span<const AugmentedInput> inputs,
                          const GenerationConfig& gen_cfg,
                          const AdaptConfig& adapt_cfg);

}  // namespace ttscale

#endif  // TTSCALE_ADAPT_H_
