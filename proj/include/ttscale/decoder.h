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

#ifndef TTSCALE_DECODER_H_
#define TTSCALE_DECODER_H_

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "ttscale/core.h"
#include "ttscale/generator.h"

namespace ttscale {

// The N next-token distributions of one decoding step, one row per
// augmented input.
class StepMatrix {
 public:
  // INVALID_ARGUMENT when empty, RAGGED_MATRIX when row lengths differ.
  explicit StepMatrix(std::vector<TokenDistribution> rows);
  // Validates each row first.
  static StepMatrix FromRows(const std::vector<std::vector<double>>& rows);

  int n() const { return static_cast<int>(rows_.size()); }
  int vocab_size() const { return rows_.front().size(); }
  const TokenDistribution& row(int i) const {
    return rows_[static_cast<size_t>(i)];
  }
  const std::vector<TokenDistribution>& rows() const { return rows_; }

 private:
  std::vector<TokenDistribution> rows_;
};

TokenDistribution AggregateAverage(const StepMatrix& m);
// softmax(-H_i) over rows, natural-log entropy.
std::vector<double> EntropyWeights(const StepMatrix& m);
TokenDistribution AggregateEntropyWeighted(const StepMatrix& m);
// Convex combination with caller-supplied weights (must sum to 1).
TokenDistribution AggregateWeighted(const StepMatrix& m,
                                    std::span<const double> weights);
// Experimental: normalized exp of the mean log-probability.
TokenDistribution AggregateLogitAverage(const StepMatrix& m);
TokenId AggregateMajority(const StepMatrix& m);
TokenId AggregateMostConfident(const StepMatrix& m);

// Outcome of one aggregation step. `distribution` is the distribution the
// token was read from; for the discrete rules it is the plain average and
// only feeds the recorded log-probability.
struct Selection {
  TokenId token = 0;
  TokenDistribution distribution = TokenDistribution::Uniform(2);
};

using Aggregator = std::function<Selection(const StepMatrix&)>;

// Aggregator for cfg.aggregation at the final layer.
Aggregator MakeAggregator(const GenerationConfig& cfg);

// Shared-prefix decoding loop with a custom per-step aggregator. Always
// works on final-layer distributions.
GenerationTrace DecodeWithAggregator(Generator& g,
                                     std::span<const AugmentedInput> inputs,
                                     const GenerationConfig& cfg,
                                     const Aggregator& aggregator);

// TTAug decoding: queries every input against the shared prefix, aggregates
// per cfg (at cfg.layer through the hidden-state path when it is not
// kFinalLayer) and appends the greedy token until EOS or max_tokens.
GenerationTrace TtaugGenerate(Generator& g,
                              std::span<const AugmentedInput> inputs,
                              const GenerationConfig& cfg);

// Single-input greedy decoding with cfg's stopping rules.
GenerationTrace GreedyDecode(Generator& g, const AugmentedInput& input,
                             const GenerationConfig& cfg);

// One JSON object per step: {"step", "token", "probs" (N x V),
// "aggregated"}. Needs a trace recorded with record_distributions.
void WriteTraceJsonl(const GenerationTrace& trace, std::ostream& out);

}  // namespace ttscale

#endif  // TTSCALE_DECODER_H_
