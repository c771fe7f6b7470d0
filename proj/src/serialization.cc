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

#include "ttscale/serialization.h"

#include <algorithm>
#include <fstream>
#include <istream>

#include <boost/archive/iterators/base64_from_binary.hpp>
#include <boost/archive/iterators/binary_from_base64.hpp>
#include <boost/archive/iterators/transform_width.hpp>

namespace ttscale {

std::string EncodeBase64(const std::vector<std::uint8_t>& bytes) {
  using namespace boost::archive::iterators;
  using It = base64_from_binary<transform_width<const std::uint8_t*, 6, 8>>;
  std::string out(It(bytes.data()), It(bytes.data() + bytes.size()));
  out.append((3 - bytes.size() % 3) % 3, '=');
  return out;
}

std::vector<std::uint8_t> DecodeBase64(std::string_view text) {
  using namespace boost::archive::iterators;
  using It = transform_width<binary_from_base64<std::string::const_iterator>,
                             8, 6>;
  std::string s(text);
  size_t pad = 0;
  while (!s.empty() && s.back() == '=') {
    s.pop_back();
    ++pad;
  }
  try {
    std::vector<std::uint8_t> out(It(s.cbegin()), It(s.cend()));
    // transform_width may emit a partial trailing byte from the padding bits.
    const size_t expected = s.size() * 6 / 8;
    out.resize(std::min(out.size(), expected));
    return out;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string("invalid base64: ") + e.what());
  }
}

void RejectUnknownKeys(const Json& j,
                       std::initializer_list<std::string_view> allowed,
                       std::string_view context) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string(context) + " must be a JSON object");
  }
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw Error(ErrorCode::kInvalidConfig,
                  "unknown key '" + key + "' in " + std::string(context));
    }
  }
}

void to_json(Json& j, const Image& image) {
  j = Json{{"height", image.height},
           {"width", image.width},
           {"pixels_b64", EncodeBase64(image.pixels)}};
}

void from_json(const Json& j, Image& image) {
  image.height = j.at("height").get<int>();
  image.width = j.at("width").get<int>();
  image.pixels = DecodeBase64(j.at("pixels_b64").get<std::string>());
  if (image.pixels.size() !=
      static_cast<size_t>(image.height) * image.width * 3) {
    throw Error(ErrorCode::kDimensionMismatch, "pixel buffer size mismatch");
  }
}

void to_json(Json& j, const AugmentedInput& input) {
  j = Json{{"image", nullptr},
           {"prompt", input.prompt},
           {"origin_id", input.origin_id},
           {"variant_index", input.variant_index}};
  if (input.image) j["image"] = *input.image;
}

void from_json(const Json& j, AugmentedInput& input) {
  input.image.reset();
  if (j.contains("image") && !j.at("image").is_null()) {
    input.image = j.at("image").get<Image>();
  }
  input.prompt = j.at("prompt").get<std::string>();
  input.origin_id = j.value("origin_id", std::string());
  input.variant_index = j.value("variant_index", 0);
}

void to_json(Json& j, const GenerationConfig& cfg) {
  j = Json{{"n_aug", cfg.n_aug},
           {"aggregation", ToString(cfg.aggregation)},
           {"layer", cfg.layer == kFinalLayer ? Json("final") : Json(cfg.layer)},
           {"modality", ToString(cfg.modality)},
           {"text_strategy", ToString(cfg.text_strategy)},
           {"image_strength", ToString(cfg.image_strength)},
           {"consistency_enforcement", cfg.consistency_enforcement},
           {"max_tokens", cfg.max_tokens},
           {"seed", cfg.seed},
           {"eos_token", cfg.eos_token},
           {"execution", ToString(cfg.execution)},
           {"logit_space", cfg.logit_space},
           {"record_distributions", cfg.record_distributions}};
}

void from_json(const Json& j, GenerationConfig& cfg) {
  RejectUnknownKeys(j,
                    {"n_aug", "aggregation", "layer", "modality",
                     "text_strategy", "image_strength",
                     "consistency_enforcement", "max_tokens", "seed",
                     "eos_token", "execution", "logit_space",
                     "record_distributions"},
                    "generation config");
  GenerationConfig out;
  try {
    out.n_aug = j.value("n_aug", out.n_aug);
    if (j.contains("aggregation")) {
      out.aggregation = ParseAggregation(j.at("aggregation").get<std::string>());
    }
    if (j.contains("layer")) {
      const Json& layer = j.at("layer");
      if (layer.is_string()) {
        if (layer.get<std::string>() != "final") {
          throw Error(ErrorCode::kInvalidConfig,
                      "layer must be an integer or \"final\"");
        }
        out.layer = kFinalLayer;
      } else {
        out.layer = layer.get<int>();
        if (out.layer < 1) {
          throw Error(ErrorCode::kInvalidConfig, "layer must be >= 1");
        }
      }
    }
    if (j.contains("modality")) {
      out.modality = ParseModality(j.at("modality").get<std::string>());
    }
    if (j.contains("text_strategy")) {
      out.text_strategy =
          ParseTextStrategy(j.at("text_strategy").get<std::string>());
    }
    if (j.contains("image_strength")) {
      out.image_strength =
          ParseImageStrength(j.at("image_strength").get<std::string>());
    }
    out.consistency_enforcement =
        j.value("consistency_enforcement", out.consistency_enforcement);
    out.max_tokens = j.value("max_tokens", out.max_tokens);
    out.seed = j.value("seed", out.seed);
    out.eos_token = j.value("eos_token", out.eos_token);
    if (j.contains("execution")) {
      out.execution = ParseExecutionMode(j.at("execution").get<std::string>());
    }
    out.logit_space = j.value("logit_space", out.logit_space);
    out.record_distributions =
        j.value("record_distributions", out.record_distributions);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig,
                std::string("generation config: ") + e.what());
  }
  out.Validate();
  cfg = out;
}

void to_json(Json& j, const GenerationTrace& trace) {
  j = Json{{"tokens", trace.tokens},
           {"per_step_distributions", trace.per_step_distributions},
           {"aggregated_distributions", trace.aggregated_distributions},
           {"token_logprobs", trace.token_logprobs},
           {"wall_time_s", trace.wall_time_s}};
}

void from_json(const Json& j, GenerationTrace& trace) {
  trace.tokens = j.at("tokens").get<TokenSequence>();
  trace.per_step_distributions.clear();
  trace.aggregated_distributions.clear();
  if (j.contains("per_step_distributions")) {
    for (const Json& step : j.at("per_step_distributions")) {
      std::vector<TokenDistribution> rows;
      for (const Json& row : step) rows.push_back(row.get<TokenDistribution>());
      trace.per_step_distributions.push_back(std::move(rows));
    }
  }
  if (j.contains("aggregated_distributions")) {
    for (const Json& row : j.at("aggregated_distributions")) {
      trace.aggregated_distributions.push_back(row.get<TokenDistribution>());
    }
  }
  trace.token_logprobs =
      j.value("token_logprobs", std::vector<double>{});
  trace.wall_time_s = j.value("wall_time_s", 0.0);
}

void to_json(Json& j, const Choice& choice) {
  j = Json{{"label", choice.label}, {"text", choice.text}};
}

void from_json(const Json& j, Choice& choice) {
  choice.label = j.at("label").get<std::string>();
  choice.text = j.value("text", std::string());
}

void to_json(Json& j, const QuestionRecord& record) {
  j = Json{{"id", record.id},
           {"image_path", nullptr},
           {"prompt", record.prompt},
           {"answers", record.answers},
           {"task", ToString(record.task)}};
  if (record.image_path) j["image_path"] = *record.image_path;
  if (!record.choices.empty()) j["choices"] = record.choices;
  if (record.math) j["math"] = true;
}

void from_json(const Json& j, QuestionRecord& record) {
  QuestionRecord out;
  out.id = j.at("id").is_string() ? j.at("id").get<std::string>()
                                  : j.at("id").dump();
  if (j.contains("image_path") && !j.at("image_path").is_null()) {
    out.image_path = j.at("image_path").get<std::string>();
  }
  out.prompt = j.at("prompt").get<std::string>();
  out.answers = j.at("answers").get<std::vector<std::string>>();
  out.task = ParseTask(j.at("task").get<std::string>());
  if (j.contains("choices") && !j.at("choices").is_null()) {
    out.choices = j.at("choices").get<std::vector<Choice>>();
  }
  out.math = j.value("math", false);
  out.Validate();
  record = std::move(out);
}

void to_json(Json& j, const MetricResult& result) {
  j = Json{{"id", result.id},
           {"score", result.score},
           {"metric_name", result.metric_name},
           {"prediction", result.prediction}};
  if (result.error) j["error"] = *result.error;
}

void from_json(const Json& j, MetricResult& result) {
  result.id = j.at("id").get<std::string>();
  result.score = j.at("score").get<double>();
  result.metric_name = j.at("metric_name").get<std::string>();
  result.prediction = j.at("prediction").get<std::string>();
  result.error.reset();
  if (j.contains("error")) result.error = j.at("error").get<std::string>();
}

std::vector<QuestionRecord> ParseQuestionRecords(std::istream& in) {
  std::vector<QuestionRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(Json::parse(line).get<QuestionRecord>());
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::kInvalidArgument,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<QuestionRecord> ReadQuestionRecords(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kDatasetNotFound, "cannot open " + path.string());
  }
  return ParseQuestionRecords(in);
}

}  // namespace ttscale
