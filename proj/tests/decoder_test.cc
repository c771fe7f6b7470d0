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

#include <algorithm>
#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "testing.h"
#include "ttscale/decoder.h"
#include "ttscale/toy_model.h"

namespace ttscale {
namespace {

using testing::Rows;
using testing::TextInput;

std::vector<double> Agg(TokenDistribution d) { return d.vector(); }

void ExpectNear(const std::vector<double>& a, const std::vector<double>& b, double tol = 1e-12) {
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol) << "entry " << i;
}

TEST(AggregateAverage, Examples) {
  ExpectNear(Agg(AggregateAverage(StepMatrix::FromRows({{0.6, 0.4}, {0.2, 0.8}}))), {0.4, 0.6});
  ExpectNear(Agg(AggregateAverage(StepMatrix::FromRows({{1, 0}, {0, 1}, {1, 0}}))),
             {2.0 / 3, 1.0 / 3});
  const std::vector<double> p{0.1, 0.2, 0.3, 0.4};
  for (int n = 1; n <= 17; ++n) {
    EXPECT_EQ(Agg(AggregateAverage(StepMatrix::FromRows(std::vector(n, p)))), p) << n;
  }
}

TEST(AggregateEntropyWeighted, Examples) {
  ExpectNear(Agg(AggregateEntropyWeighted(StepMatrix::FromRows({{1, 0}, {0.5, 0.5}}))),
             {5.0 / 6, 1.0 / 6});
  ExpectNear(Agg(AggregateEntropyWeighted(StepMatrix::FromRows({{0.6, 0.4}, {0.4, 0.6}}))),
             {0.5, 0.5});
  ExpectNear(Agg(AggregateEntropyWeighted(StepMatrix::FromRows({{0.3, 0.7}}))), {0.3, 0.7});
}

TEST(AggregateMajority, Examples) {
  EXPECT_EQ(AggregateMajority(StepMatrix::FromRows({{0.9, 0.1}, {0.8, 0.2}, {0.1, 0.9}})), 0);
  EXPECT_EQ(AggregateMajority(StepMatrix::FromRows({{0.6, 0.4}, {0.3, 0.7}})), 0);
  EXPECT_EQ(AggregateMajority(StepMatrix::FromRows({{0.1, 0.1, 0.8}, {0, 0, 1}})), 2);
}

TEST(AggregateMostConfident, Examples) {
  EXPECT_EQ(AggregateMostConfident(StepMatrix::FromRows({{0.6, 0.4}, {0.2, 0.8}})), 1);
  EXPECT_EQ(AggregateMostConfident(StepMatrix::FromRows({{0.3, 0.7}})), 1);
  EXPECT_EQ(AggregateMostConfident(StepMatrix::FromRows({{0.7, 0.3}, {0.7, 0.3}})), 0);
  // Equal maxima on different tokens: lower token index wins.
  EXPECT_EQ(AggregateMostConfident(StepMatrix::FromRows({{0.1, 0.6, 0.3}, {0.6, 0.1, 0.3}})), 0);
}

TEST(StepMatrix, RejectsRaggedAndEmpty) {
  EXPECT_CODE(StepMatrix::FromRows({{0.5, 0.5}, {1.0}}), ErrorCode::kRaggedMatrix);
  EXPECT_CODE(StepMatrix(std::vector<TokenDistribution>{}), ErrorCode::kInvalidArgument);
  EXPECT_CODE(StepMatrix::FromRows({{0.5, 0.6}}), ErrorCode::kNotNormalized);
}

TEST(Aggregation, MatchesOraclesOnRandomMatrices) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 1 + trial % 9;
    const int v = 2 + trial % 13;
    const StepMatrix m = testing::RandomStepMatrix(rng, n, v);
    const auto rows = Rows(m);
    ExpectNear(Agg(AggregateAverage(m)), testing::OracleAverage(rows), 1e-14);
    ExpectNear(Agg(AggregateEntropyWeighted(m)), testing::OracleEntropyWeighted(rows), 1e-13);
    EXPECT_EQ(AggregateMajority(m), testing::OracleMajority(rows));
    EXPECT_EQ(AggregateMostConfident(m), testing::OracleMostConfident(rows));
    TokenDistribution::Validate(AggregateAverage(m).vector());
    TokenDistribution::Validate(AggregateEntropyWeighted(m).vector());
  }
}

TEST(Aggregation, PermutationInvariant) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const StepMatrix m = testing::RandomStepMatrix(rng, 2 + trial % 6, 3 + trial % 5);
    auto rows = Rows(m);
    std::shuffle(rows.begin(), rows.end(), rng);
    const StepMatrix shuffled = StepMatrix::FromRows(rows);
    ExpectNear(Agg(AggregateAverage(shuffled)), Agg(AggregateAverage(m)), 1e-15);
    ExpectNear(Agg(AggregateEntropyWeighted(shuffled)), Agg(AggregateEntropyWeighted(m)), 1e-15);
    EXPECT_EQ(AggregateMajority(shuffled), AggregateMajority(m));
    EXPECT_EQ(AggregateMostConfident(shuffled), AggregateMostConfident(m));
  }
}

TEST(AggregateWeighted, ValidatesWeights) {
  const StepMatrix m = StepMatrix::FromRows({{1, 0}, {0, 1}});
  const std::vector<double> w{0.25, 0.75};
  ExpectNear(Agg(AggregateWeighted(m, w)), {0.25, 0.75});
  const std::vector<double> short_w{1.0};
  EXPECT_CODE(AggregateWeighted(m, short_w), ErrorCode::kDimensionMismatch);
}

GenerationConfig Config(int n, Aggregation rule, int max_tokens = 3) {
  GenerationConfig cfg;
  cfg.n_aug = n;
  cfg.aggregation = rule;
  cfg.max_tokens = max_tokens;
  return cfg;
}

TEST(TtaugGenerate, AveragingOverridesOneInput) {
  ToyModelSpec spec;
  spec.vocab = {"<eos>", "a", "b"};
  // Step-1 rows [0.6, 0.4, 0] and [0.1, 0.9, 0] over tokens (a, b, eos) are
  // laid out with EOS last in this vocabulary order.
  spec.Set("one", std::nullopt, {}, {0.0, 0.6, 0.4});
  spec.Set("two", std::nullopt, {}, {0.0, 0.1, 0.9});
  spec.Set("one", std::nullopt, {2}, {1.0, 0.0, 0.0});
  spec.Set("two", std::nullopt, {2}, {1.0, 0.0, 0.0});
  ToyModel model(spec);
  const std::vector inputs{TextInput("one"), TextInput("two", 1)};
  const auto trace = TtaugGenerate(model, inputs, Config(2, Aggregation::kAverage));
  EXPECT_EQ(trace.tokens, (TokenSequence{2, 0}));
  EXPECT_NEAR(trace.token_logprobs[0], std::log(0.65), 1e-12);
  EXPECT_EQ(GreedyDecode(model, inputs[0], Config(1, Aggregation::kAverage)).tokens[0], 1);
}

TEST(TtaugGenerate, MatchesExhaustiveOracle) {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const int n = 1 + static_cast<int>(seed % 4);
    ToyModel model(testing::RandomTreeSpec(seed, 4, n, 3));
    const auto inputs = testing::TreeInputs(n);
    for (auto rule : {Aggregation::kAverage, Aggregation::kEntropyWeighted,
                      Aggregation::kMajority, Aggregation::kMostConfident}) {
      const auto trace = TtaugGenerate(model, inputs, Config(n, rule));
      EXPECT_EQ(trace.tokens, testing::ExhaustiveGreedy(model, inputs, rule, 3))
          << "seed " << seed << " rule " << ToString(rule);
    }
  }
}

TEST(TtaugGenerate, CopiesEqualSingleInputGreedy) {
  ToyModelSpec spec = testing::RandomTreeSpec(9, 6, 1, 4);
  ToyModel model(spec);
  const AugmentedInput in = TextInput("fixture 0");
  const auto single = GreedyDecode(model, in, Config(1, Aggregation::kAverage, 5));
  for (int n : {1, 2, 3, 5, 16}) {
    const std::vector<AugmentedInput> copies(static_cast<size_t>(n), in);
    for (auto rule : {Aggregation::kAverage, Aggregation::kEntropyWeighted,
                      Aggregation::kMajority, Aggregation::kMostConfident}) {
      const auto t = TtaugGenerate(model, copies, Config(n, rule, 5));
      EXPECT_EQ(t.tokens, single.tokens) << n << ToString(rule);
    }
    for (int layer = 1; layer <= model.num_layers(); ++layer) {
      GenerationConfig cfg = Config(n, Aggregation::kAverage, 5);
      cfg.layer = layer;
      const auto t = TtaugGenerate(model, copies, cfg);
      EXPECT_EQ(t.tokens, single.tokens);
      EXPECT_EQ(t.token_logprobs, single.token_logprobs) << "n " << n << " layer " << layer;
    }
  }
}

TEST(TtaugGenerate, FinalLayerThroughHiddenPathIsExact) {
  ToyModel model(testing::RandomTreeSpec(12, 5, 1, 3));
  const auto inputs = testing::TreeInputs(1);
  GenerationConfig cfg = Config(1, Aggregation::kAverage, 4);
  const auto final_path = TtaugGenerate(model, inputs, cfg);
  cfg.layer = model.num_layers();
  const auto hidden_path = TtaugGenerate(model, inputs, cfg);
  EXPECT_EQ(hidden_path.tokens, final_path.tokens);
  EXPECT_EQ(hidden_path.token_logprobs, final_path.token_logprobs);
}

TEST(TtaugGenerate, EarlyLayerMixesHiddenStates) {
  ToyModel model(testing::RandomTreeSpec(31, 5, 3, 3));
  const auto inputs = testing::TreeInputs(3);
  for (int layer = 1; layer < model.num_layers(); ++layer) {
    GenerationConfig cfg = Config(3, Aggregation::kAverage, 3);
    cfg.layer = layer;
    const auto trace = TtaugGenerate(model, inputs, cfg);
    // Oracle: plain mean of the hidden vectors, resumed, then greedy.
    TokenSequence prefix;
    for (size_t j = 0; j < trace.tokens.size(); ++j) {
      std::vector<double> mean(static_cast<size_t>(model.hidden_dim()), 0.0);
      for (const auto& in : inputs) {
        const auto h = model.StepHidden(in, prefix, layer);
        for (size_t k = 0; k < mean.size(); ++k) mean[k] += h[k] / 3.0;
      }
      const auto p = model.ResumeFromHidden(mean, layer);
      EXPECT_EQ(trace.tokens[j], p.Argmax()) << "layer " << layer << " step " << j;
      EXPECT_NEAR(trace.token_logprobs[j], std::log(p[p.Argmax()]), 1e-9);
      prefix.push_back(trace.tokens[j]);
    }
  }
}

TEST(TtaugGenerate, DiscreteRulesRejectHiddenLayers) {
  ToyModel model(testing::RandomTreeSpec(2, 4, 2, 2));
  GenerationConfig cfg = Config(2, Aggregation::kMajority);
  cfg.layer = 1;
  EXPECT_CODE(TtaugGenerate(model, testing::TreeInputs(2), cfg), ErrorCode::kInvalidConfig);
}

TEST(TtaugGenerate, InputCountMismatch) {
  ToyModel model(testing::RandomTreeSpec(2, 4, 2, 2));
  EXPECT_CODE(TtaugGenerate(model, testing::TreeInputs(2), Config(3, Aggregation::kAverage)),
              ErrorCode::kInputCountMismatch);
}

TEST(TtaugGenerate, ParallelEqualsSequentialAndIsDeterministic) {
  ToyModelSpec spec = testing::RandomTreeSpec(44, 6, 8, 3);
  spec.work_per_layer = 1;
  ToyModel model(spec);
  const auto inputs = testing::TreeInputs(8);
  for (auto rule : {Aggregation::kAverage, Aggregation::kEntropyWeighted,
                    Aggregation::kMajority, Aggregation::kMostConfident}) {
    GenerationConfig cfg = Config(8, rule, 4);
    cfg.record_distributions = true;
    auto seq = TtaugGenerate(model, inputs, cfg);
    cfg.execution = ExecutionMode::kParallel;
    auto par = TtaugGenerate(model, inputs, cfg);
    auto again = TtaugGenerate(model, inputs, cfg);
    seq.wall_time_s = par.wall_time_s = again.wall_time_s = 0;
    EXPECT_EQ(seq, par);
    EXPECT_EQ(par, again);
  }
}

TEST(TtaugGenerate, StopsAtEosOrMaxTokens) {
  ToyModelSpec spec;
  spec.vocab = {"<eos>", "a"};
  spec.Set("loop", std::nullopt, {}, {0.1, 0.9});
  ToyModel model(spec);
  // Unseen prefixes are uniform, where EOS (index 0) wins the tie.
  const auto t = GreedyDecode(model, TextInput("loop"), Config(1, Aggregation::kAverage, 8));
  EXPECT_EQ(t.tokens, (TokenSequence{1, 0}));
  const auto capped = GreedyDecode(model, TextInput("loop"), Config(1, Aggregation::kAverage, 1));
  EXPECT_EQ(capped.tokens, (TokenSequence{1}));
}

TEST(WriteTraceJsonl, OneLinePerStep) {
  ToyModel model(testing::RandomTreeSpec(3, 4, 2, 2));
  GenerationConfig cfg = Config(2, Aggregation::kAverage, 2);
  cfg.record_distributions = true;
  const auto trace = TtaugGenerate(model, testing::TreeInputs(2), cfg);
  std::ostringstream out;
  WriteTraceJsonl(trace, out);
  std::istringstream in(out.str());
  int lines = 0;
  for (std::string line; std::getline(in, line); ++lines) {
    const Json j = Json::parse(line);
    EXPECT_EQ(j.at("probs").size(), 2u);
    EXPECT_EQ(j.at("probs")[0].size(), 4u);
  }
  EXPECT_EQ(lines, static_cast<int>(trace.tokens.size()));
}

}  // namespace
}  // namespace ttscale
