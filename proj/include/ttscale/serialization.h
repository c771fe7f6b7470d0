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

#ifndef TTSCALE_SERIALIZATION_H_
#define TTSCALE_SERIALIZATION_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "ttscale/core.h"

namespace ttscale {

using Json = nlohmann::json;

std::string EncodeBase64(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> DecodeBase64(std::string_view text);

void to_json(Json& j, const Image& image);
void from_json(const Json& j, Image& image);
void to_json(Json& j, const AugmentedInput& input);
void from_json(const Json& j, AugmentedInput& input);
// Strict: unknown keys raise INVALID_CONFIG.
void to_json(Json& j, const GenerationConfig& cfg);
void from_json(const Json& j, GenerationConfig& cfg);
void to_json(Json& j, const GenerationTrace& trace);
void from_json(const Json& j, GenerationTrace& trace);
void to_json(Json& j, const Choice& choice);
void from_json(const Json& j, Choice& choice);
void to_json(Json& j, const QuestionRecord& record);
void from_json(const Json& j, QuestionRecord& record);
void to_json(Json& j, const MetricResult& result);
void from_json(const Json& j, MetricResult& result);

// Throws INVALID_CONFIG naming the first key of `j` outside `allowed`.
void RejectUnknownKeys(const Json& j, std::initializer_list<std::string_view> allowed,
                       std::string_view context);

// One record per line; blank lines are skipped. DATASET_NOT_FOUND if the
// file does not exist.
std::vector<QuestionRecord> ReadQuestionRecords(
    const std::filesystem::path& path);
std::vector<QuestionRecord> ParseQuestionRecords(std::istream& in);

template <typename T>
void WriteJsonLines(std::ostream& out, const std::vector<T>& values) {
  for (const T& v : values) out << Json(v).dump() << '\n';
}

}  // namespace ttscale

// TokenDistribution has no default constructor, so it needs a serializer
// that constructs the validated value directly.
template <>
struct nlohmann::adl_serializer<ttscale::TokenDistribution> {
  static ttscale::TokenDistribution from_json(const json& j) {
    return ttscale::TokenDistribution::Validate(j.get<std::vector<double>>());
  }
  static void to_json(json& j, const ttscale::TokenDistribution& d) {
    j = d.vector();
  }
};

#endif  // TTSCALE_SERIALIZATION_H_
