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

#include "ttscale/decoder.h"

#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "ttscale/serialization.h"

namespace ttscale {
namespace {

// Floor for log(0) in the experimental logit-space rule.
constexpr double kLogFloor = 1e-300;

// sum_i w_i r_i written as r_0 + sum_i w_i (r_i - r_0), for weights summing
// to 1. Copies of one row mix back to that row bit for bit, for any N.
std::vector<double> AnchoredMix(const std::vector<const std::vector<double>*>& rows,
                                std::span<const double> weights) {
  const std::vector<double>& anchor = *rows.front();
  std::vector<double> out = anchor;
  for (size_t k = 0; k < out.size(); ++k) {
    double shift = 0.0;
    for (size_t i = 1; i < rows.size(); ++i) {
      shift += weights[i] * ((*rows[i])[k] - anchor[k]);
    }
    out[k] += shift;
  }
  return out;
}

std::vector<double> WeightedSum(const StepMatrix& m,
                                std::span<const double> weights) {
  std::vector<const std::vector<double>*> rows;
  for (const TokenDistribution& r : m.rows()) rows.push_back(&r.vector());
  return AnchoredMix(rows, weights);
}

void CheckInputs(std::span<const AugmentedInput> inputs,
                 const GenerationConfig& cfg) {
  cfg.Validate();
  if (static_cast<int>(inputs.size()) != cfg.n_aug) {
    throw Error(ErrorCode::kInputCountMismatch,
                "got " + std::to_string(inputs.size()) + " inputs for n_aug " +
                    std::to_string(cfg.n_aug));
  }
}

bool Finished(const GenerationTrace& trace, const GenerationConfig& cfg) {
  return (!trace.tokens.empty() && trace.tokens.back() == cfg.eos_token) ||
         static_cast<int>(trace.tokens.size()) >= cfg.max_tokens;
}

double Seconds(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since)
      .count();
}

void Append(GenerationTrace& trace, const GenerationConfig& cfg,
            std::vector<TokenDistribution> rows, const Selection& sel) {
  trace.tokens.push_back(sel.token);
  trace.token_logprobs.push_back(std::log(sel.distribution[sel.token]));
  if (cfg.record_distributions) {
    trace.per_step_distributions.push_back(std::move(rows));
    trace.aggregated_distributions.push_back(sel.distribution);
  }
}

}  // namespace

StepMatrix::StepMatrix(std::vector<TokenDistribution> rows)
    : rows_(std::move(rows)) {
  if (rows_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "step matrix needs >= 1 row");
  }
  for (const TokenDistribution& r : rows_) {
    if (r.size() != rows_.front().size()) {
      throw Error(ErrorCode::kRaggedMatrix, "rows have different lengths");
    }
  }
}

StepMatrix StepMatrix::FromRows(const std::vector<std::vector<double>>& rows) {
  if (!rows.empty()) {
    for (const auto& r : rows) {
      if (r.size() != rows.front().size()) {
        throw Error(ErrorCode::kRaggedMatrix, "rows have different lengths");
      }
    }
  }
  std::vector<TokenDistribution> validated;
  validated.reserve(rows.size());
  for (const auto& r : rows) validated.push_back(TokenDistribution::Validate(r));
  return StepMatrix(std::move(validated));
}

TokenDistribution AggregateAverage(const StepMatrix& m) {
  const std::vector<double> uniform(static_cast<size_t>(m.n()), 1.0 / m.n());
  return TokenDistribution::Validate(WeightedSum(m, uniform));
}

std::vector<double> EntropyWeights(const StepMatrix& m) {
  std::vector<double> neg_entropy;
  neg_entropy.reserve(static_cast<size_t>(m.n()));
  for (const TokenDistribution& r : m.rows()) neg_entropy.push_back(-r.Entropy());
  return Softmax(neg_entropy).vector();
}

TokenDistribution AggregateEntropyWeighted(const StepMatrix& m) {
  const std::vector<double> w = EntropyWeights(m);
  return TokenDistribution::Validate(WeightedSum(m, w));
}

TokenDistribution AggregateWeighted(const StepMatrix& m,
                                    std::span<const double> weights) {
  if (static_cast<int>(weights.size()) != m.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "one weight per row required");
  }
  return TokenDistribution::Validate(WeightedSum(m, weights));
}

TokenDistribution AggregateLogitAverage(const StepMatrix& m) {
  std::vector<double> mean(static_cast<size_t>(m.vocab_size()), 0.0);
  for (const TokenDistribution& r : m.rows()) {
    for (size_t v = 0; v < mean.size(); ++v) {
      mean[v] += std::log(std::max(r.vector()[v], kLogFloor));
    }
  }
  for (double& x : mean) x /= m.n();
  return Softmax(mean);
}

TokenId AggregateMajority(const StepMatrix& m) {
  std::vector<double> votes(static_cast<size_t>(m.vocab_size()), 0.0);
  for (const TokenDistribution& r : m.rows()) {
    votes[static_cast<size_t>(r.Argmax())] += 1.0;
  }
  return ArgmaxLowestIndex(votes);
}

TokenId AggregateMostConfident(const StepMatrix& m) {
  TokenId best_token = 0;
  double best = -1.0;
  for (TokenId v = 0; v < m.vocab_size(); ++v) {
    for (const TokenDistribution& r : m.rows()) {
      if (r[v] > best) {
        best = r[v];
        best_token = v;
      }
    }
  }
  return best_token;
}

Aggregator MakeAggregator(const GenerationConfig& cfg) {
  if (cfg.logit_space) {
    return [](const StepMatrix& m) {
      TokenDistribution d = AggregateLogitAverage(m);
      return Selection{d.Argmax(), std::move(d)};
    };
  }
  switch (cfg.aggregation) {
    case Aggregation::kAverage:
      return [](const StepMatrix& m) {
        TokenDistribution d = AggregateAverage(m);
        return Selection{d.Argmax(), std::move(d)};
      };
    case Aggregation::kEntropyWeighted:
      return [](const StepMatrix& m) {
        TokenDistribution d = AggregateEntropyWeighted(m);
        return Selection{d.Argmax(), std::move(d)};
      };
    case Aggregation::kMajority:
      return [](const StepMatrix& m) {
        return Selection{AggregateMajority(m), AggregateAverage(m)};
      };
    case Aggregation::kMostConfident:
      return [](const StepMatrix& m) {
        return Selection{AggregateMostConfident(m), AggregateAverage(m)};
      };
  }
  throw Error(ErrorCode::kInvalidConfig, "unknown aggregation");
}

GenerationTrace DecodeWithAggregator(Generator& g,
                                     std::span<const AugmentedInput> inputs,
                                     const GenerationConfig& cfg,
                                     const Aggregator& aggregator) {
  CheckInputs(inputs, cfg);
  const auto start = std::chrono::steady_clock::now();
  GenerationTrace trace;
  while (!Finished(trace, cfg)) {
    StepMatrix m(g.StepBatch(inputs, trace.tokens, cfg.execution));
    if (m.vocab_size() != g.vocab_size()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "generator returned a distribution of the wrong size");
    }
    const Selection sel = aggregator(m);
    Append(trace, cfg, m.rows(), sel);
  }
  trace.wall_time_s = Seconds(start);
  return trace;
}

GenerationTrace TtaugGenerate(Generator& g,
                              std::span<const AugmentedInput> inputs,
                              const GenerationConfig& cfg) {
  CheckInputs(inputs, cfg);
  if (cfg.layer == kFinalLayer) {
    return DecodeWithAggregator(g, inputs, cfg, MakeAggregator(cfg));
  }

  // Hidden-state path: combine h_{i,l,j} and run layers l+1..L once.
  const auto start = std::chrono::steady_clock::now();
  const bool entropy = cfg.aggregation == Aggregation::kEntropyWeighted;
  GenerationTrace trace;
  while (!Finished(trace, cfg)) {
    const auto hidden =
        g.StepHiddenBatch(inputs, trace.tokens, cfg.layer, cfg.execution);
    std::vector<TokenDistribution> rows;
    if (entropy || cfg.record_distributions) {
      rows = g.StepBatch(inputs, trace.tokens, cfg.execution);
    }
    std::vector<double> weights(inputs.size(), 1.0 / inputs.size());
    if (entropy) weights = EntropyWeights(StepMatrix(rows));

    std::vector<const std::vector<double>*> terms;
    for (const std::vector<double>& h : hidden) {
      if (h.size() != hidden.front().size()) {
        throw Error(ErrorCode::kRaggedMatrix, "hidden states differ in size");
      }
      terms.push_back(&h);
    }
    const std::vector<double> mixed = AnchoredMix(terms, weights);
    TokenDistribution p = g.ResumeFromHidden(mixed, cfg.layer);
    const Selection sel{p.Argmax(), std::move(p)};
    Append(trace, cfg, std::move(rows), sel);
  }
  trace.wall_time_s = Seconds(start);
  return trace;
}

GenerationTrace GreedyDecode(Generator& g, const AugmentedInput& input,
                             const GenerationConfig& cfg) {
  GenerationConfig single = cfg;
  single.n_aug = 1;
  single.layer = kFinalLayer;
  single.aggregation = Aggregation::kAverage;
  single.logit_space = false;
  return TtaugGenerate(g, std::span<const AugmentedInput>(&input, 1), single);
}

void WriteTraceJsonl(const GenerationTrace& trace, std::ostream& out) {
  for (size_t j = 0; j < trace.tokens.size(); ++j) {
    Json line{{"step", j}, {"token", trace.tokens[j]}};
    if (j < trace.per_step_distributions.size()) {
      line["probs"] = trace.per_step_distributions[j];
    }
    if (j < trace.aggregated_distributions.size()) {
      line["aggregated"] = trace.aggregated_distributions[j];
    }
    out << line.dump() << '\n';
  }
}

}  // namespace ttscale
