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

#ifndef TTSCALE_CORE_H_
#define TTSCALE_CORE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ttscale/image.h"

namespace ttscale {

enum class ErrorCode {
  kInvalidArgument,
  kNegativeProb,
  kNotNormalized,
  kContextOverflow,
  kRemoteUnavailable,
  kUnsupportedCapability,
  kLayerOutOfRange,
  kDimensionMismatch,
  kNoSnapshot,
  kParaphraserSchemaViolation,
  kEmptyImage,
  kRaggedMatrix,
  kInputCountMismatch,
  kConstraintUnsatisfiable,
  kInfeasible,
  kNotFound,
  kKExceedsM,
  kUnknownTask,
  kDatasetNotFound,
  kModelUnavailable,
  kInvalidConfig,
  kIo,
};

// Upper-snake name of the code, e.g. "NOT_NORMALIZED".
std::string_view ErrorCodeName(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

using TokenId = std::int32_t;
using TokenSequence = std::vector<TokenId>;

inline constexpr double kNormalizationTolerance = 1e-6;
inline constexpr double kNegativeTolerance = 1e-9;

// Index of the largest entry; the lowest index wins ties.
TokenId ArgmaxLowestIndex(std::span<const double> values);

// A probability vector over the vocabulary at one generation step.
//
// Instances are only produced by Validate()/Uniform(), so every live
// TokenDistribution has non-negative entries summing to 1 within
// kNormalizationTolerance.
class TokenDistribution {
 public:
  // Clamps entries in [-1e-9, 0) to zero and renormalizes when the sum is
  // within tolerance of 1. Throws NEGATIVE_PROB / NOT_NORMALIZED otherwise.
  static TokenDistribution Validate(std::vector<double> probs);
  static TokenDistribution Uniform(int vocab_size);

  std::span<const double> probs() const { return probs_; }
  const std::vector<double>& vector() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double operator[](int i) const { return probs_[static_cast<size_t>(i)]; }

  TokenId Argmax() const { return ArgmaxLowestIndex(probs_); }
  // Shannon entropy in nats; 0·ln 0 is taken as 0.
  double Entropy() const;

  friend bool operator==(const TokenDistribution&,
                         const TokenDistribution&) = default;

 private:
  explicit TokenDistribution(std::vector<double> probs)
      : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

inline TokenDistribution ValidateDistribution(std::vector<double> probs) {
  return TokenDistribution::Validate(std::move(probs));
}

// Numerically stable softmax; entries may be -inf but not all of them.
TokenDistribution Softmax(std::span<const double> logits);

// One (image, prompt) variant of a question.
struct AugmentedInput {
  std::optional<Image> image;
  std::string prompt;
  std::string origin_id;
  int variant_index = 0;

  friend bool operator==(const AugmentedInput&, const AugmentedInput&) =
      default;
};

enum class Aggregation { kAverage, kEntropyWeighted, kMajority, kMostConfident };
enum class Modality { kText, kImage, kBoth, kNone };
enum class TextStrategy { kClassical, kSelfParaphrase };
enum class ImageStrength { kLow, kMedium, kHigh };
enum class ExecutionMode { kSequential, kParallel };

// Layers are 1-based; kFinalLayer aggregates output distributions.
inline constexpr int kFinalLayer = 0;

struct GenerationConfig {
  int n_aug = 16;
  Aggregation aggregation = Aggregation::kAverage;
  int layer = kFinalLayer;
  Modality modality = Modality::kBoth;
  TextStrategy text_strategy = TextStrategy::kClassical;
  ImageStrength image_strength = ImageStrength::kHigh;
  bool consistency_enforcement = true;
  int max_tokens = 64;
  std::uint64_t seed = 0;
  TokenId eos_token = 0;
  ExecutionMode execution = ExecutionMode::kSequential;
  // Experimental: average log-probabilities instead of probabilities.
  bool logit_space = false;
  // Keep the N x |V| matrices and aggregated rows in the trace.
  bool record_distributions = false;

  // Throws INVALID_CONFIG when an invariant does not hold.
  void Validate() const;

  friend bool operator==(const GenerationConfig&, const GenerationConfig&) =
      default;
};

struct GenerationTrace {
  TokenSequence tokens;
  std::vector<std::vector<TokenDistribution>> per_step_distributions;
  std::vector<TokenDistribution> aggregated_distributions;
  // Natural-log probability of each chosen token under the distribution it
  // was selected from.
  std::vector<double> token_logprobs;
  double wall_time_s = 0.0;

  friend bool operator==(const GenerationTrace&, const GenerationTrace&) =
      default;
};

// True when the trace ends in EOS or has reached max_tokens.
bool TraceIsTerminated(const GenerationTrace& trace,
                       const GenerationConfig& cfg);

enum class Task { kExact, kVqa, kRelaxed, kSubstring, kMcq, kYesNo, kCaption };

struct Choice {
  std::string label;
  std::string text;

  friend bool operator==(const Choice&, const Choice&) = default;
};

struct QuestionRecord {
  std::string id;
  std::optional<std::string> image_path;
  std::string prompt;
  std::vector<std::string> answers;
  Task task = Task::kExact;
  std::vector<Choice> choices;
  // Mathematical-expression item: substring matching ignores whitespace.
  bool math = false;

  void Validate() const;

  friend bool operator==(const QuestionRecord&, const QuestionRecord&) =
      default;
};

struct MetricResult {
  std::string id;
  double score = 0.0;
  std::string metric_name;
  std::string prediction;
  // Set when the record could not be scored.
  std::optional<std::string> error;

  friend bool operator==(const MetricResult&, const MetricResult&) = default;
};

std::string_view ToString(Aggregation v);
std::string_view ToString(Modality v);
std::string_view ToString(TextStrategy v);
std::string_view ToString(ImageStrength v);
std::string_view ToString(ExecutionMode v);
std::string_view ToString(Task v);

Aggregation ParseAggregation(std::string_view s);
Modality ParseModality(std::string_view s);
TextStrategy ParseTextStrategy(std::string_view s);
ImageStrength ParseImageStrength(std::string_view s);
ExecutionMode ParseExecutionMode(std::string_view s);
// Throws UNKNOWN_TASK.
Task ParseTask(std::string_view s);

}  // namespace ttscale

#endif  // TTSCALE_CORE_H_
