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

#include "ttscale/core.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>

namespace ttscale {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kNegativeProb: return "NEGATIVE_PROB";
    case ErrorCode::kNotNormalized: return "NOT_NORMALIZED";
    case ErrorCode::kContextOverflow: return "CONTEXT_OVERFLOW";
    case ErrorCode::kRemoteUnavailable: return "REMOTE_UNAVAILABLE";
    case ErrorCode::kUnsupportedCapability: return "UNSUPPORTED_CAPABILITY";
    case ErrorCode::kLayerOutOfRange: return "LAYER_OUT_OF_RANGE";
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kNoSnapshot: return "NO_SNAPSHOT";
    case ErrorCode::kParaphraserSchemaViolation:
      return "PARAPHRASER_SCHEMA_VIOLATION";
    case ErrorCode::kEmptyImage: return "EMPTY_IMAGE";
    case ErrorCode::kRaggedMatrix: return "RAGGED_MATRIX";
    case ErrorCode::kInputCountMismatch: return "INPUT_COUNT_MISMATCH";
    case ErrorCode::kConstraintUnsatisfiable:
      return "CONSTRAINT_UNSATISFIABLE";
    case ErrorCode::kInfeasible: return "INFEASIBLE";
    case ErrorCode::kNotFound: return "NOT_FOUND";
    case ErrorCode::kKExceedsM: return "K_EXCEEDS_M";
    case ErrorCode::kUnknownTask: return "UNKNOWN_TASK";
    case ErrorCode::kDatasetNotFound: return "DATASET_NOT_FOUND";
    case ErrorCode::kModelUnavailable: return "MODEL_UNAVAILABLE";
    case ErrorCode::kInvalidConfig: return "INVALID_CONFIG";
    case ErrorCode::kIo: return "IO";
  }
  return "UNKNOWN";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

TokenId ArgmaxLowestIndex(std::span<const double> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "argmax of empty vector");
  }
  size_t best = 0;
  for (size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return static_cast<TokenId>(best);
}

TokenDistribution TokenDistribution::Validate(std::vector<double> probs) {
  if (probs.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty distribution");
  }
  double sum = 0.0;
  for (double& p : probs) {
    if (std::isnan(p) || std::isinf(p)) {
      throw Error(ErrorCode::kNotNormalized, "non-finite probability");
    }
    if (p < -kNegativeTolerance) {
      throw Error(ErrorCode::kNegativeProb,
                  "entry " + std::to_string(p) + " is negative");
    }
    if (p < 0.0) p = 0.0;
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw Error(ErrorCode::kNotNormalized,
                "sum " + std::to_string(sum) + " is not 1");
  }
  // Sums already within accumulation error of 1 are left untouched so that
  // validation is idempotent bit for bit.
  const double slack = 8.0 * static_cast<double>(probs.size()) *
                       std::numeric_limits<double>::epsilon();
  if (std::abs(sum - 1.0) > slack) {
    for (double& p : probs) p /= sum;
  }
  return TokenDistribution(std::move(probs));
}

TokenDistribution TokenDistribution::Uniform(int vocab_size) {
  if (vocab_size < 1) {
    throw Error(ErrorCode::kInvalidArgument, "vocab_size must be positive");
  }
  return TokenDistribution(std::vector<double>(
      static_cast<size_t>(vocab_size), 1.0 / static_cast<double>(vocab_size)));
}

double TokenDistribution::Entropy() const {
  double h = 0.0;
  for (double p : probs_) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

TokenDistribution Softmax(std::span<const double> logits) {
  if (logits.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "softmax of empty vector");
  }
  const double max = *std::max_element(logits.begin(), logits.end());
  if (!std::isfinite(max)) {
    throw Error(ErrorCode::kInvalidArgument, "softmax needs a finite maximum");
  }
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - max);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return TokenDistribution::Validate(std::move(out));
}

void GenerationConfig::Validate() const {
  if (n_aug < 1) throw Error(ErrorCode::kInvalidConfig, "n_aug must be >= 1");
  if (max_tokens < 1) {
    throw Error(ErrorCode::kInvalidConfig, "max_tokens must be >= 1");
  }
  if (layer < 0) {
    throw Error(ErrorCode::kInvalidConfig, "layer must be >= 1 or final");
  }
  if (layer != kFinalLayer && (aggregation == Aggregation::kMajority ||
                               aggregation == Aggregation::kMostConfident)) {
    throw Error(ErrorCode::kInvalidConfig,
                "discrete aggregation rules require the final layer");
  }
  if (layer != kFinalLayer && logit_space) {
    throw Error(ErrorCode::kInvalidConfig,
                "logit_space applies to final-layer aggregation only");
  }
}

bool TraceIsTerminated(const GenerationTrace& trace,
                       const GenerationConfig& cfg) {
  if (static_cast<int>(trace.tokens.size()) == cfg.max_tokens) return true;
  return !trace.tokens.empty() && trace.tokens.back() == cfg.eos_token;
}

void QuestionRecord::Validate() const {
  if (id.empty()) throw Error(ErrorCode::kInvalidArgument, "record id empty");
  if (answers.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "record " + id + " has no answers");
  }
  if (task == Task::kMcq) {
    if (choices.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "mcq record " + id + " has no choices");
    }
    std::set<std::string> seen;
    for (const Choice& c : choices) {
      if (c.label.size() != 1 || c.label[0] < 'A' || c.label[0] > 'Z') {
        throw Error(ErrorCode::kInvalidArgument,
                    "choice label '" + c.label + "' is not one uppercase letter");
      }
      if (!seen.insert(c.label).second) {
        throw Error(ErrorCode::kInvalidArgument,
                    "duplicate choice label " + c.label);
      }
    }
  }
}

namespace {

template <typename E, size_t N>
std::string_view NameOf(E value,
                        const std::array<std::pair<E, std::string_view>, N>& t) {
  for (const auto& [e, name] : t) {
    if (e == value) return name;
  }
  return "?";
}

template <typename E, size_t N>
E Parse(std::string_view s,
        const std::array<std::pair<E, std::string_view>, N>& t,
        std::string_view what, ErrorCode code = ErrorCode::kInvalidConfig) {
  for (const auto& [e, name] : t) {
    if (name == s) return e;
  }
  throw Error(code, "unknown " + std::string(what) + " '" + std::string(s) +
                        "'");
}

constexpr std::array<std::pair<Aggregation, std::string_view>, 4>
    kAggregationNames{{{Aggregation::kAverage, "average"},
                       {Aggregation::kEntropyWeighted, "entropy_weighted"},
                       {Aggregation::kMajority, "majority"},
                       {Aggregation::kMostConfident, "most_confident"}}};
constexpr std::array<std::pair<Modality, std::string_view>, 4> kModalityNames{
    {{Modality::kText, "text"},
     {Modality::kImage, "image"},
     {Modality::kBoth, "both"},
     {Modality::kNone, "none"}}};
constexpr std::array<std::pair<TextStrategy, std::string_view>, 2>
    kTextStrategyNames{{{TextStrategy::kClassical, "classical"},
                        {TextStrategy::kSelfParaphrase, "self_paraphrase"}}};
constexpr std::array<std::pair<ImageStrength, std::string_view>, 3>
    kStrengthNames{{{ImageStrength::kLow, "low"},
                    {ImageStrength::kMedium, "medium"},
                    {ImageStrength::kHigh, "high"}}};
constexpr std::array<std::pair<ExecutionMode, std::string_view>, 2>
    kExecutionNames{{{ExecutionMode::kSequential, "sequential"},
                     {ExecutionMode::kParallel, "parallel"}}};
constexpr std::array<std::pair<Task, std::string_view>, 7> kTaskNames{
    {{Task::kExact, "exact"},
     {Task::kVqa, "vqa"},
     {Task::kRelaxed, "relaxed"},
     {Task::kSubstring, "substring"},
     {Task::kMcq, "mcq"},
     {Task::kYesNo, "yesno"},
     {Task::kCaption, "caption"}}};

}  // namespace

std::string_view ToString(Aggregation v) { return NameOf(v, kAggregationNames); }
std::string_view ToString(Modality v) { return NameOf(v, kModalityNames); }
std::string_view ToString(TextStrategy v) {
  return NameOf(v, kTextStrategyNames);
}
std::string_view ToString(ImageStrength v) { return NameOf(v, kStrengthNames); }
std::string_view ToString(ExecutionMode v) {
  return NameOf(v, kExecutionNames);
}
std::string_view ToString(Task v) { return NameOf(v, kTaskNames); }

Aggregation ParseAggregation(std::string_view s) {
  return Parse(s, kAggregationNames, "aggregation");
}
Modality ParseModality(std::string_view s) {
  return Parse(s, kModalityNames, "modality");
}
TextStrategy ParseTextStrategy(std::string_view s) {
  return Parse(s, kTextStrategyNames, "text_strategy");
}
ImageStrength ParseImageStrength(std::string_view s) {
  return Parse(s, kStrengthNames, "image_strength");
}
ExecutionMode ParseExecutionMode(std::string_view s) {
  return Parse(s, kExecutionNames, "execution mode");
}
Task ParseTask(std::string_view s) {
  return Parse(s, kTaskNames, "task", ErrorCode::kUnknownTask);
}

}  // namespace ttscale
