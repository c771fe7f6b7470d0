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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "testing.h"
#include "ttscale/core.h"
#include "ttscale/image.h"
#include "ttscale/serialization.h"

namespace ttscale {
namespace {

TEST(TokenDistribution, AcceptsNormalizedVector) {
  const auto d = TokenDistribution::Validate({0.5, 0.5});
  EXPECT_EQ(d.vector(), (std::vector<double>{0.5, 0.5}));
}

TEST(TokenDistribution, RenormalizesWithinTolerance) {
  const auto d = TokenDistribution::Validate({0.5, 0.5000004});
  EXPECT_NEAR(d[0] + d[1], 1.0, 1e-15);
  EXPECT_LT(d[0], d[1]);
}

TEST(TokenDistribution, RejectsBadSums) {
  EXPECT_CODE(TokenDistribution::Validate({0.9, 0.2}), ErrorCode::kNotNormalized);
  EXPECT_CODE(TokenDistribution::Validate({1.1, -0.1}), ErrorCode::kNegativeProb);
  EXPECT_CODE(TokenDistribution::Validate({NAN, 1.0}), ErrorCode::kNotNormalized);
}

TEST(TokenDistribution, ClampsTinyNegatives) {
  const auto d = TokenDistribution::Validate({1.0, -1e-12});
  EXPECT_EQ(d[1], 0.0);
}

TEST(TokenDistribution, ValidationIsIdempotent) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = testing::RandomDistribution(rng, 1 + trial % 40, 0.3);
    p[0] += 3e-7;  // force the renormalization branch
    const auto once = TokenDistribution::Validate(p);
    const auto twice = TokenDistribution::Validate(once.vector());
    EXPECT_EQ(once, twice);
  }
}

TEST(TokenDistribution, EntropyAndArgmax) {
  const auto d = TokenDistribution::Validate({0.25, 0.5, 0.25, 0.0});
  EXPECT_NEAR(d.Entropy(), 1.5 * std::log(2.0), 1e-15);
  EXPECT_EQ(d.Argmax(), 1);
  EXPECT_EQ(TokenDistribution::Uniform(4).Argmax(), 0);
  EXPECT_NEAR(TokenDistribution::Uniform(4).Entropy(), std::log(4.0), 1e-15);
}

TEST(Softmax, MatchesClosedForm) {
  const std::vector<double> logits{0.0, std::log(3.0)};
  const auto d = Softmax(logits);
  EXPECT_NEAR(d[0], 0.25, 1e-15);
  EXPECT_NEAR(d[1], 0.75, 1e-15);
  const std::vector<double> with_inf{-INFINITY, 0.0};
  EXPECT_EQ(Softmax(with_inf)[1], 1.0);
}

TEST(GenerationConfig, DefaultsAndValidation) {
  GenerationConfig cfg;
  EXPECT_EQ(cfg.n_aug, 16);
  EXPECT_EQ(cfg.aggregation, Aggregation::kAverage);
  EXPECT_EQ(cfg.layer, kFinalLayer);
  EXPECT_EQ(cfg.modality, Modality::kBoth);
  EXPECT_EQ(cfg.image_strength, ImageStrength::kHigh);
  EXPECT_TRUE(cfg.consistency_enforcement);
  cfg.Validate();

  GenerationConfig discrete_hidden;
  discrete_hidden.aggregation = Aggregation::kMajority;
  discrete_hidden.layer = 2;
  EXPECT_CODE(discrete_hidden.Validate(), ErrorCode::kInvalidConfig);

  GenerationConfig zero;
  zero.n_aug = 0;
  EXPECT_CODE(zero.Validate(), ErrorCode::kInvalidConfig);
}

TEST(GenerationConfig, JsonRoundTripAndStrictKeys) {
  GenerationConfig cfg;
  cfg.n_aug = 4;
  cfg.aggregation = Aggregation::kEntropyWeighted;
  cfg.layer = 3;
  cfg.modality = Modality::kText;
  cfg.text_strategy = TextStrategy::kSelfParaphrase;
  cfg.image_strength = ImageStrength::kLow;
  cfg.seed = 0xffffffffffffffffULL;
  cfg.execution = ExecutionMode::kParallel;
  EXPECT_EQ(Json(cfg).get<GenerationConfig>(), cfg);

  Json bad = Json(cfg);
  bad["n_augs"] = 3;
  EXPECT_CODE(bad.get<GenerationConfig>(), ErrorCode::kInvalidConfig);
  Json wrong_type = Json(cfg);
  wrong_type["n_aug"] = "four";
  EXPECT_CODE(wrong_type.get<GenerationConfig>(), ErrorCode::kInvalidConfig);
}

TEST(Enums, StringRoundTrip) {
  for (auto a : {Aggregation::kAverage, Aggregation::kEntropyWeighted,
                 Aggregation::kMajority, Aggregation::kMostConfident}) {
    EXPECT_EQ(ParseAggregation(ToString(a)), a);
  }
  for (auto m : {Modality::kText, Modality::kImage, Modality::kBoth, Modality::kNone}) {
    EXPECT_EQ(ParseModality(ToString(m)), m);
  }
  for (auto t : {Task::kExact, Task::kVqa, Task::kRelaxed, Task::kSubstring,
                 Task::kMcq, Task::kYesNo, Task::kCaption}) {
    EXPECT_EQ(ParseTask(ToString(t)), t);
  }
  EXPECT_CODE(ParseTask("essay"), ErrorCode::kUnknownTask);
  EXPECT_EQ(ErrorCodeName(ErrorCode::kNotNormalized), "NOT_NORMALIZED");
}

TEST(QuestionRecord, ParsesJsonLines) {
  std::istringstream in(
      R"({"id": "a", "prompt": "What?", "answers": ["x"], "task": "exact"})"
      "\n\n"
      R"({"id": "b", "image_path": "b.png", "prompt": "Pick", "answers": ["B"], "task": "mcq",)"
      R"( "choices": [{"label": "A", "text": "one"}, {"label": "B", "text": "two"}]})"
      "\n");
  const auto records = ParseQuestionRecords(in);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1].image_path, "b.png");
  EXPECT_EQ(records[1].choices[1].text, "two");
  EXPECT_EQ(Json(records[1]).get<QuestionRecord>(), records[1]);
}

TEST(QuestionRecord, McqNeedsDistinctUppercaseLabels) {
  QuestionRecord rec;
  rec.id = "m";
  rec.prompt = "p";
  rec.answers = {"A"};
  rec.task = Task::kMcq;
  EXPECT_CODE(rec.Validate(), ErrorCode::kInvalidArgument);
  rec.choices = {{"A", "x"}, {"A", "y"}};
  EXPECT_CODE(rec.Validate(), ErrorCode::kInvalidArgument);
  rec.choices = {{"a", "x"}};
  EXPECT_CODE(rec.Validate(), ErrorCode::kInvalidArgument);
  rec.choices = {{"A", "x"}, {"B", "y"}};
  rec.Validate();
}

TEST(QuestionRecord, MissingDatasetIsReported) {
  EXPECT_CODE(ReadQuestionRecords("/nonexistent/data.jsonl"), ErrorCode::kDatasetNotFound);
}

TEST(Serialization, TraceAndInputRoundTrip) {
  AugmentedInput in;
  in.prompt = "Describe";
  in.origin_id = "q1";
  in.variant_index = 2;
  in.image = Image(2, 3, 7);
  in.image->at(1, 2, 0) = 200;
  EXPECT_EQ(Json(in).get<AugmentedInput>(), in);

  GenerationTrace t;
  t.tokens = {3, 1, 0};
  t.per_step_distributions = {{TokenDistribution::Validate({0.25, 0.75})}};
  t.aggregated_distributions = {TokenDistribution::Validate({0.25, 0.75})};
  t.token_logprobs = {-0.1, -0.2, -0.3};
  t.wall_time_s = 0.5;
  EXPECT_EQ(Json::parse(Json(t).dump()).get<GenerationTrace>(), t);

  MetricResult r{"q", 0.5, "vqa_score", "red", std::string("boom")};
  EXPECT_EQ(Json(r).get<MetricResult>(), r);
}

TEST(Serialization, Base64RoundTrip) {
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < 257; ++i) bytes.push_back(static_cast<std::uint8_t>(i * 7));
  for (size_t n : {0u, 1u, 2u, 3u, 4u, 257u}) {
    std::vector<std::uint8_t> prefix(bytes.begin(), bytes.begin() + n);
    EXPECT_EQ(DecodeBase64(EncodeBase64(prefix)), prefix);
  }
  EXPECT_EQ(EncodeBase64({'f', 'o', 'o', 'b'}), "Zm9vYg==");
}

TEST(Image, PngRoundTripIsLossless) {
  Image img(5, 7);
  for (int y = 0; y < 5; ++y) {
    for (int x = 0; x < 7; ++x) {
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = static_cast<std::uint8_t>(y * 40 + x * 3 + c);
    }
  }
  EXPECT_EQ(DecodeImage(EncodePng(img)), img);
  Image other = img;
  other.at(0, 0, 0) ^= 1;
  EXPECT_NE(img.Fingerprint(), other.Fingerprint());
}

}  // namespace
}  // namespace ttscale
