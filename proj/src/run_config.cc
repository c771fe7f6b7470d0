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

#include "ttscale/run_config.h"

#include <array>
#include <fstream>
#include <sstream>
#include <utility>

#include "ttscale/remote_generator.h"
#include "ttscale/toy_model.h"

namespace ttscale {
namespace {

constexpr std::array<std::pair<Method, std::string_view>, 8> kMethodNames{{
    {Method::kBaseline, "baseline"},
    {Method::kTtaug, "ttaug"},
    {Method::kTtadaptWeights, "ttadapt_weights"},
    {Method::kTtadaptParams, "ttadapt_params"},
    {Method::kSelfConsistency, "self_consistency"},
    {Method::kSelfSelector, "self_selector"},
    {Method::kSampleAndRank, "sample_and_rank"},
    {Method::kSelfSynthesizer, "self_synthesizer"},
}};

[[noreturn]] void Invalid(const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, what);
}

// Runs `fn`, turning JSON type errors and argument errors into
// INVALID_CONFIG tagged with `context`.
template <typename Fn>
void Strict(std::string_view context, Fn fn) {
  try {
    fn();
  } catch (const Json::exception& e) {
    Invalid(std::string(context) + ": " + e.what());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kInvalidArgument) throw;
    Invalid(std::string(context) + ": " + e.what());
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::filesystem::path& p) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

}  // namespace

std::string_view ToString(Method m) {
  for (const auto& [value, name] : kMethodNames) {
    if (value == m) return name;
  }
  return "unknown";
}

Method ParseMethod(std::string_view s) {
  for (const auto& [value, name] : kMethodNames) {
    if (name == s) return value;
  }
  Invalid("unknown method '" + std::string(s) + "'");
}

bool IsAnswerLevel(Method m) {
  return m == Method::kSelfConsistency || m == Method::kSelfSelector ||
         m == Method::kSampleAndRank || m == Method::kSelfSynthesizer;
}

void RunConfig::Validate() const {
  generation.Validate();
  if (method == Method::kTtadaptParams && !adapt) {
    Invalid("method ttadapt_params needs an \"adapt\" section");
  }
  if (method == Method::kTtadaptWeights && !weight_opt) {
    Invalid("method ttadapt_weights needs a \"weight_opt\" section");
  }
  if (dataset_path.empty()) Invalid("dataset_path is required");
  if (model.location.empty()) Invalid("model location is required");
  if (output_dir.empty()) Invalid("output_dir is required");
  if (sample_k < 1) Invalid("sample_k must be >= 1");
  if (workers < 1) Invalid("workers must be >= 1");
  if (!(temperature > 0.0)) Invalid("temperature must be > 0");
  Strict("adapt", [&] {
    if (adapt) adapt->Validate();
  });
  Strict("weight_opt", [&] {
    if (weight_opt) weight_opt->Validate();
  });
}

void to_json(Json& j, const WeightOptConfig& cfg) {
  j = Json{{"learning_rate", cfg.learning_rate},
           {"weight_decay", cfg.weight_decay},
           {"micro_steps", cfg.micro_steps},
           {"grad_clip_norm", cfg.grad_clip_norm},
           {"entropy_eps", cfg.entropy_eps}};
}

void from_json(const Json& j, WeightOptConfig& cfg) {
  RejectUnknownKeys(j,
                    {"learning_rate", "weight_decay", "micro_steps",
                     "grad_clip_norm", "entropy_eps"},
                    "weight_opt");
  WeightOptConfig out;
  Strict("weight_opt", [&] {
    out.learning_rate = j.value("learning_rate", out.learning_rate);
    out.weight_decay = j.value("weight_decay", out.weight_decay);
    out.micro_steps = j.value("micro_steps", out.micro_steps);
    out.grad_clip_norm = j.value("grad_clip_norm", out.grad_clip_norm);
    out.entropy_eps = j.value("entropy_eps", out.entropy_eps);
    out.Validate();
  });
  cfg = out;
}

void to_json(Json& j, const AdaptConfig& cfg) {
  j = Json{{"pseudo_iterations", cfg.pseudo_iterations},
           {"train_steps", cfg.train_steps},
           {"learning_rate", cfg.learning_rate},
           {"warmup_steps", cfg.warmup_steps},
           {"weight_decay", cfg.weight_decay},
           {"batch_size", cfg.batch_size},
           {"grad_accum", cfg.grad_accum}};
}

void from_json(const Json& j, AdaptConfig& cfg) {
  RejectUnknownKeys(j,
                    {"pseudo_iterations", "train_steps", "learning_rate",
                     "warmup_steps", "weight_decay", "batch_size",
                     "grad_accum"},
                    "adapt");
  AdaptConfig out;
  Strict("adapt", [&] {
    out.pseudo_iterations = j.value("pseudo_iterations", out.pseudo_iterations);
    out.train_steps = j.value("train_steps", out.train_steps);
    out.learning_rate = j.value("learning_rate", out.learning_rate);
    out.warmup_steps = j.value("warmup_steps", out.warmup_steps);
    out.weight_decay = j.value("weight_decay", out.weight_decay);
    out.batch_size = j.value("batch_size", out.batch_size);
    out.grad_accum = j.value("grad_accum", out.grad_accum);
    out.Validate();
  });
  cfg = out;
}

void to_json(Json& j, const RunConfig& cfg) {
  j = Json{{"method", ToString(cfg.method)},
           {"generation", cfg.generation},
           {"dataset_path", cfg.dataset_path.string()},
           {"model", cfg.model.kind == ModelRef::Kind::kToy
                         ? Json{{"toy", cfg.model.location}}
                         : Json{{"remote", cfg.model.location}}},
           {"sample_k", cfg.sample_k},
           {"output_dir", cfg.output_dir.string()},
           {"workers", cfg.workers},
           {"candidates", cfg.candidates == CandidateSource::kAugmented
                              ? "augmented"
                              : "temperature"},
           {"temperature", cfg.temperature}};
  if (cfg.adapt) j["adapt"] = *cfg.adapt;
  if (cfg.weight_opt) j["weight_opt"] = *cfg.weight_opt;
}

void from_json(const Json& j, RunConfig& cfg) {
  RejectUnknownKeys(j,
                    {"method", "generation", "adapt", "weight_opt",
                     "dataset_path", "model", "sample_k", "output_dir",
                     "workers", "candidates", "temperature"},
                    "run config");
  RunConfig out;
  Strict("run config", [&] {
    out.method = ParseMethod(j.at("method").get<std::string>());
    if (j.contains("generation")) out.generation = j.at("generation").get<GenerationConfig>();
    if (j.contains("adapt")) out.adapt = j.at("adapt").get<AdaptConfig>();
    if (j.contains("weight_opt")) out.weight_opt = j.at("weight_opt").get<WeightOptConfig>();
    out.dataset_path = j.at("dataset_path").get<std::string>();
    const Json& model = j.at("model");
    RejectUnknownKeys(model, {"toy", "remote"}, "model");
    if (model.size() != 1) Invalid("model needs exactly one of toy, remote");
    if (model.contains("toy")) {
      out.model = {ModelRef::Kind::kToy, model.at("toy").get<std::string>()};
    } else {
      out.model = {ModelRef::Kind::kRemote, model.at("remote").get<std::string>()};
    }
    const auto k = j.value("sample_k", std::int64_t{1000});
    if (k < 1) Invalid("sample_k must be >= 1");
    out.sample_k = static_cast<std::size_t>(k);
    out.output_dir = j.at("output_dir").get<std::string>();
    out.workers = j.value("workers", out.workers);
    const std::string source = j.value("candidates", std::string("augmented"));
    if (source == "augmented") {
      out.candidates = CandidateSource::kAugmented;
    } else if (source == "temperature") {
      out.candidates = CandidateSource::kTemperature;
    } else {
      Invalid("candidates must be \"augmented\" or \"temperature\"");
    }
    out.temperature = j.value("temperature", out.temperature);
  });
  out.Validate();
  cfg = std::move(out);
}

RunConfig ParseRunConfig(std::string_view text,
                         const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::exception& e) {
    Invalid(std::string("run config is not valid JSON: ") + e.what());
  }
  RunConfig cfg = j.get<RunConfig>();
  cfg.dataset_path = Resolve(base_dir, cfg.dataset_path);
  cfg.output_dir = Resolve(base_dir, cfg.output_dir);
  if (cfg.model.kind == ModelRef::Kind::kToy) {
    cfg.model.location = Resolve(base_dir, cfg.model.location).string();
  }
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read " + path.string());
  std::stringstream text;
  text << in.rdbuf();
  return ParseRunConfig(text.str(), path.parent_path());
}

std::unique_ptr<Generator> OpenModel(const ModelRef& ref) {
  if (ref.kind == ModelRef::Kind::kToy) return ToyModel::FromFile(ref.location);
  try {
    return std::make_unique<RemoteGenerator>(OpenEndpoint(ref.location));
  } catch (const Error& e) {
    throw Error(ErrorCode::kModelUnavailable,
                "cannot reach " + ref.location + ": " + e.what());
  }
}

}  // namespace ttscale
