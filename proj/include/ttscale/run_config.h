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

#ifndef TTSCALE_RUN_CONFIG_H_
#define TTSCALE_RUN_CONFIG_H_

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ttscale/adapt.h"
#include "ttscale/core.h"
#include "ttscale/generator.h"
#include "ttscale/serialization.h"

namespace ttscale {

enum class Method {
  kBaseline,
  kTtaug,
  kTtadaptWeights,
  kTtadaptParams,
  kSelfConsistency,
  kSelfSelector,
  kSampleAndRank,
  kSelfSynthesizer,
};

std::string_view ToString(Method m);
// INVALID_CONFIG for an unknown name.
Method ParseMethod(std::string_view s);
bool IsAnswerLevel(Method m);

// Where answer-level methods get their N candidates from.
enum class CandidateSource { kAugmented, kTemperature };

struct ModelRef {
  enum class Kind { kToy, kRemote };
  Kind kind = Kind::kToy;
  // Spec file path for toy models, endpoint string for remote ones.
  std::string location;
};

struct RunConfig {
  Method method = Method::kTtaug;
  GenerationConfig generation;
  std::optional<AdaptConfig> adapt;
  std::optional<WeightOptConfig> weight_opt;
  std::filesystem::path dataset_path;
  ModelRef model;
  std::size_t sample_k = 1000;
  std::filesystem::path output_dir;
  int workers = 1;
  CandidateSource candidates = CandidateSource::kAugmented;
  double temperature = 1.0;

  // INVALID_CONFIG when a method lacks its sub-config or a value is out of
  // range.
  void Validate() const;
};

void to_json(Json& j, const WeightOptConfig& cfg);
void from_json(const Json& j, WeightOptConfig& cfg);
void to_json(Json& j, const AdaptConfig& cfg);
void from_json(const Json& j, AdaptConfig& cfg);
void to_json(Json& j, const RunConfig& cfg);
void from_json(const Json& j, RunConfig& cfg);

// Parses and validates a run config. Relative paths inside it resolve
// against `base_dir`.
RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path& base_dir = {});
// Relative paths resolve against the config file's directory.
RunConfig LoadRunConfig(const std::filesystem::path& path);

// MODEL_UNAVAILABLE when the model cannot be loaded or reached.
std::unique_ptr<Generator> OpenModel(const ModelRef& ref);

}  // namespace ttscale

#endif  // TTSCALE_RUN_CONFIG_H_
