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

#include "ttscale/adapt.h"

#include <cmath>

#include "ttscale/optim.h"

namespace ttscale {
namespace {

void Require(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

void RequireConfig(bool ok, const char* what) {
  if (!ok) throw Error(ErrorCode::kInvalidConfig, what);
}

std::vector<double> SoftmaxVector(std::span<const double> w) {
  const TokenDistribution d = Softmax(w);
  return d.vector();
}

std::vector<double> Mixture(std::span<const double> alpha, const StepMatrix& m) {
  std::vector<double> mix(static_cast<size_t>(m.vocab_size()), 0.0);
  for (int i = 0; i < m.n(); ++i) {
    const auto row = m.row(i).probs();
    for (size_t v = 0; v < mix.size(); ++v) mix[v] += alpha[static_cast<size_t>(i)] * row[v];
  }
  return mix;
}

void CheckWeights(std::span<const double> weights, const StepMatrix& m) {
  if (static_cast<int>(weights.size()) != m.n()) {
    throw Error(ErrorCode::kDimensionMismatch, "one weight per row required");
  }
  for (double w : weights) Require(std::isfinite(w), "weights must be finite");
}

// Restores the generator's weights when a question finishes, however it
// finishes.
class WeightGuard {
 public:
  explicit WeightGuard(Generator& g) : g_(g), snapshot_(g.CloneWeights()) {}
  ~WeightGuard() { g_.RestoreWeights(snapshot_); }
  WeightGuard(const WeightGuard&) = delete;
  WeightGuard& operator=(const WeightGuard&) = delete;

 private:
  Generator& g_;
  WeightSnapshot snapshot_;
};

}  // namespace

void WeightOptConfig::Validate() const {
  RequireConfig(learning_rate > 0 && weight_decay > 0 && grad_clip_norm > 0 &&
              entropy_eps > 0,
          "weight optimization settings must be positive");
  RequireConfig(micro_steps >= 1, "micro_steps must be >= 1");
}

void AdaptConfig::Validate() const {
  RequireConfig(pseudo_iterations >= 1, "pseudo_iterations must be >= 1");
  RequireConfig(train_steps >= 0 && warmup_steps >= 0, "step counts must be >= 0");
  RequireConfig(learning_rate > 0 && weight_decay >= 0, "bad learning rate or decay");
  RequireConfig(batch_size >= 1 && grad_accum >= 1, "batch sizes must be >= 1");
}

double MarginalEntropy(std::span<const double> weights, const StepMatrix& m,
                       double eps) {
  CheckWeights(weights, m);
  const std::vector<double> mix = Mixture(SoftmaxVector(weights), m);
  double h = 0.0;
  for (double p : mix) h -= p * std::log(p + eps);
  return std::max(h, 0.0);
}

std::vector<double> EntropyGradient(std::span<const double> weights,
                                    const StepMatrix& m, double eps) {
  CheckWeights(weights, m);
  const std::vector<double> alpha = SoftmaxVector(weights);
  const std::vector<double> mix = Mixture(alpha, m);
  // dH/dmix_v, then through the mixture to alpha, then through the softmax.
  std::vector<double> dmix(mix.size());
  for (size_t v = 0; v < mix.size(); ++v) {
    dmix[v] = -std::log(mix[v] + eps) - mix[v] / (mix[v] + eps);
  }
  std::vector<double> dalpha(alpha.size(), 0.0);
  double mean = 0.0;
  for (int i = 0; i < m.n(); ++i) {
    const auto row = m.row(i).probs();
    double s = 0.0;
    for (size_t v = 0; v < mix.size(); ++v) s += dmix[v] * row[v];
    dalpha[static_cast<size_t>(i)] = s;
    mean += alpha[static_cast<size_t>(i)] * s;
  }
  std::vector<double> grad(alpha.size());
  for (size_t i = 0; i < alpha.size(); ++i) grad[i] = alpha[i] * (dalpha[i] - mean);
  return grad;
}

std::vector<double> OptimizeStepWeights(const StepMatrix& m,
                                        const WeightOptConfig& cfg) {
  cfg.Validate();
  std::vector<double> w(static_cast<size_t>(m.n()), 1.0 / m.n());
  AdamMoments moments;
  AdamWStep hp;
  hp.learning_rate = cfg.learning_rate;
  hp.weight_decay = cfg.weight_decay;
  for (int step = 1; step <= cfg.micro_steps; ++step) {
    std::vector<double> grad = EntropyGradient(w, m, cfg.entropy_eps);
    ClipGradNorm(grad, cfg.grad_clip_norm);
    AdamWUpdate(w, grad, moments, step, hp);
  }
  return SoftmaxVector(w);
}

std::vector<std::vector<double>> OptimizeWeights(
    const std::vector<StepMatrix>& steps, const WeightOptConfig& cfg) {
  std::vector<std::vector<double>> out;
  out.reserve(steps.size());
  for (const StepMatrix& m : steps) out.push_back(OptimizeStepWeights(m, cfg));
  return out;
}

GenerationTrace TtadaptWeightsGenerate(Generator& g,
                                       std::span<const AugmentedInput> inputs,
                                       const GenerationConfig& gen_cfg,
                                       const WeightOptConfig& weight_cfg) {
  weight_cfg.Validate();
  const Aggregator optimized = [&weight_cfg](const StepMatrix& m) {
    const std::vector<double> w = OptimizeStepWeights(m, weight_cfg);
    Selection s;
    s.distribution = AggregateWeighted(m, w);
    s.token = s.distribution.Argmax();
    return s;
  };
  return DecodeWithAggregator(g, inputs, gen_cfg, optimized);
}

void FineTuneOnPseudolabel(Generator& g, std::span<const AugmentedInput> inputs,
                           std::span<const TokenId> target,
                           const AdaptConfig& cfg) {
  cfg.Validate();
  Require(!inputs.empty(), "no inputs to train on");
  if (target.empty()) return;
  const int per_step = cfg.batch_size * cfg.grad_accum;
  const double scale = 1.0 / per_step;
  AdamWStep hp;
  hp.weight_decay = cfg.weight_decay;
  size_t cursor = 0;
  for (int step = 0; step < cfg.train_steps; ++step) {
    g.ZeroGrad();
    for (int k = 0; k < per_step; ++k) {
      g.AccumulateGradient(inputs[cursor], target, scale);
      cursor = (cursor + 1) % inputs.size();
    }
    hp.learning_rate = cfg.learning_rate *
                       CosineWithWarmup(step, cfg.warmup_steps, cfg.train_steps);
    g.ApplyAdamW(hp);
  }
}

GenerationTrace TtadaptParamsGenerate(Generator& g,
                                      std::span<const AugmentedInput> inputs,
                                      const GenerationConfig& gen_cfg,
                                      const AdaptConfig& adapt_cfg) {
  adapt_cfg.Validate();
  if (!g.capabilities().trainable) {
    throw Error(ErrorCode::kUnsupportedCapability,
                "parameter adaptation needs a trainable generator");
  }
  GenerationConfig consensus = gen_cfg;
  consensus.aggregation = Aggregation::kAverage;
  consensus.layer = kFinalLayer;

  WeightGuard guard(g);
  GenerationTrace trace;
  for (int it = 0; it < adapt_cfg.pseudo_iterations; ++it) {
    trace = TtaugGenerate(g, inputs, consensus);
    if (it + 1 < adapt_cfg.pseudo_iterations) {
      FineTuneOnPseudolabel(g, inputs, trace.tokens, adapt_cfg);
    }
  }
  return trace;
}

std::string TtadaptAnswer(Generator& g, std::span<const AugmentedInput> inputs,
                          const GenerationConfig& gen_cfg,
                          const AdaptConfig& adapt_cfg) {
  const GenerationTrace trace = TtadaptParamsGenerate(g, inputs, gen_cfg, adapt_cfg);
  return g.vocabulary().Decode(trace.tokens);
}

}  // namespace ttscale
