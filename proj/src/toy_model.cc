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

#include "ttscale/toy_model.h"

#include <atomic>
#include <cmath>
#include <fstream>
#include <future>
#include <numeric>
#include <sstream>

#include "ttscale/random.h"

namespace ttscale {
namespace {

// Stands in for log(0); exp(kMinLogit - max) underflows to exactly 0.
constexpr double kMinLogit = -1e4;

std::atomic<std::uint64_t> next_model_id{1};

std::string ToHex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << v;
  return os.str();
}

std::uint64_t FromHex(const std::string& s) {
  std::size_t used = 0;
  const std::uint64_t v = std::stoull(s, &used, 16);
  if (used != s.size()) {
    throw Error(ErrorCode::kInvalidArgument, "bad fingerprint '" + s + "'");
  }
  return v;
}

}  // namespace

std::uint64_t ToyContextKey(std::string_view prompt,
                            std::optional<std::uint64_t> image_fingerprint,
                            std::span<const TokenId> prefix) {
  StableHasher h;
  h.UpdateU64(prompt.size()).Update(prompt);
  if (image_fingerprint) {
    h.UpdateU64(1).UpdateU64(*image_fingerprint);
  } else {
    h.UpdateU64(0);
  }
  h.UpdateU64(prefix.size());
  for (TokenId t : prefix) h.UpdateU64(static_cast<std::uint64_t>(t));
  return h.digest();
}

std::uint64_t ToyContextKey(const AugmentedInput& input,
                            std::span<const TokenId> prefix) {
  std::optional<std::uint64_t> fp;
  if (input.image) fp = input.image->Fingerprint();
  return ToyContextKey(input.prompt, fp, prefix);
}

void ToyModelSpec::Set(std::string_view prompt,
                       const std::optional<Image>& image, TokenSequence prefix,
                       std::vector<double> probs) {
  ToyEntry entry;
  entry.prompt = std::string(prompt);
  if (image) entry.image_fingerprint = image->Fingerprint();
  entry.prefix = std::move(prefix);
  entry.probs = std::move(probs);
  entries.push_back(std::move(entry));
}

void to_json(Json& j, const ToyModelSpec& spec) {
  Json entries = Json::array();
  for (const ToyEntry& e : spec.entries) {
    Json je{{"prompt", e.prompt},
            {"image_fingerprint", nullptr},
            {"prefix", e.prefix},
            {"probs", e.probs}};
    if (e.image_fingerprint) je["image_fingerprint"] = ToHex(*e.image_fingerprint);
    entries.push_back(std::move(je));
  }
  j = Json{{"vocab", spec.vocab},
           {"eos", spec.eos},
           {"num_layers", spec.num_layers},
           {"hidden_dim", spec.hidden_dim},
           {"layer_seed", spec.layer_seed},
           {"context_limit", spec.context_limit},
           {"work_per_layer", spec.work_per_layer},
           {"trainable", spec.trainable},
           {"entries", std::move(entries)}};
}

void from_json(const Json& j, ToyModelSpec& spec) {
  RejectUnknownKeys(j,
                    {"vocab", "eos", "num_layers", "hidden_dim", "layer_seed",
                     "context_limit", "work_per_layer", "trainable", "entries"},
                    "toy model spec");
  ToyModelSpec out;
  out.vocab = j.at("vocab").get<std::vector<std::string>>();
  out.eos = j.value("eos", 0);
  out.num_layers = j.value("num_layers", out.num_layers);
  out.hidden_dim = j.value("hidden_dim", 0);
  out.layer_seed = j.value("layer_seed", std::uint64_t{0});
  out.context_limit = j.value("context_limit", out.context_limit);
  out.work_per_layer = j.value("work_per_layer", 0);
  out.trainable = j.value("trainable", true);
  if (j.contains("entries")) {
    for (const Json& je : j.at("entries")) {
      ToyEntry e;
      e.prompt = je.at("prompt").get<std::string>();
      if (je.contains("image_fingerprint") &&
          !je.at("image_fingerprint").is_null()) {
        e.image_fingerprint = FromHex(je.at("image_fingerprint").get<std::string>());
      }
      e.prefix = je.value("prefix", TokenSequence{});
      e.probs = je.at("probs").get<std::vector<double>>();
      out.entries.push_back(std::move(e));
    }
  }
  spec = std::move(out);
}

ToyModel::ToyModel(ToyModelSpec spec)
    : spec_(std::move(spec)),
      vocab_(spec_.vocab, spec_.eos),
      id_(next_model_id.fetch_add(1)) {
  if (spec_.num_layers < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_layers must be >= 1");
  }
  const int v = vocab_.size();
  hidden_dim_ = spec_.hidden_dim == 0 ? v + 8 : spec_.hidden_dim;
  if (hidden_dim_ < v) {
    throw Error(ErrorCode::kInvalidArgument,
                "hidden_dim must be at least the vocabulary size");
  }

  for (int layer = 1; layer <= spec_.num_layers; ++layer) {
    SeededRng rng(MixSeed(spec_.layer_seed, static_cast<std::uint64_t>(layer)));
    std::vector<int> slots(static_cast<size_t>(hidden_dim_));
    std::iota(slots.begin(), slots.end(), 0);
    rng.Shuffle(slots);
    LayerMap map;
    map.position.assign(slots.begin(), slots.begin() + v);
    map.sign.resize(static_cast<size_t>(v));
    for (double& s : map.sign) s = rng.Bernoulli(0.5) ? -1.0 : 1.0;
    map.exponent = rng.UniformInt(-3, 3);
    layers_.push_back(std::move(map));
  }

  if (spec_.work_per_layer > 0) {
    SeededRng rng(MixSeed(spec_.layer_seed, 0xfeed));
    mixing_.resize(static_cast<size_t>(hidden_dim_) * hidden_dim_);
    const double scale = 1.0 / std::sqrt(static_cast<double>(hidden_dim_));
    for (double& w : mixing_) w = rng.Uniform(-scale, scale);
  }

  for (const ToyEntry& e : spec_.entries) {
    if (static_cast<int>(e.probs.size()) != v) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "table row for '" + e.prompt + "' has wrong length");
    }
    const TokenDistribution p = TokenDistribution::Validate(e.probs);
    std::vector<double> logits(static_cast<size_t>(v));
    for (int i = 0; i < v; ++i) {
      logits[static_cast<size_t>(i)] = p[i] > 0.0 ? std::log(p[i]) : kMinLogit;
    }
    params_.logits[ToyContextKey(e.prompt, e.image_fingerprint, e.prefix)] =
        std::move(logits);
  }
}

std::unique_ptr<ToyModel> ToyModel::FromFile(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kModelUnavailable, "cannot open " + path.string());
  }
  try {
    return std::make_unique<ToyModel>(Json::parse(in).get<ToyModelSpec>());
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kModelUnavailable,
                path.string() + ": " + e.what());
  }
}

std::vector<double> ToyModel::LogitsFor(std::uint64_t key) const {
  auto it = params_.logits.find(key);
  if (it == params_.logits.end()) {
    return std::vector<double>(static_cast<size_t>(vocab_.size()), 0.0);
  }
  return it->second;
}

double ToyModel::SimulateLayers(std::uint64_t key, int from, int to) const {
  if (spec_.work_per_layer <= 0 || from >= to) return 0.0;
  const size_t d = static_cast<size_t>(hidden_dim_);
  std::vector<double> x(d), y(d);
  SeededRng rng(key);
  for (double& v : x) v = rng.Uniform(-1.0, 1.0);
  const int rounds = (to - from) * spec_.work_per_layer;
  for (int r = 0; r < rounds; ++r) {
    for (size_t i = 0; i < d; ++i) {
      const double* row = &mixing_[i * d];
      double acc = 0.0;
      for (size_t k = 0; k < d; ++k) acc += row[k] * x[k];
      y[i] = std::tanh(acc);
    }
    x.swap(y);
  }
  return std::accumulate(x.begin(), x.end(), 0.0);
}

void ToyModel::CheckLayer(int layer) const {
  if (layer < 1 || layer > spec_.num_layers) {
    throw Error(ErrorCode::kLayerOutOfRange,
                "layer " + std::to_string(layer) + " not in [1, " +
                    std::to_string(spec_.num_layers) + "]");
  }
}

TokenDistribution ToyModel::Evaluate(const AugmentedInput& input,
                                     std::span<const TokenId> prefix) const {
  CheckPrefix(prefix);
  const std::uint64_t key = ToyContextKey(input, prefix);
  volatile double sink = SimulateLayers(key, 0, spec_.num_layers);
  (void)sink;
  return Softmax(LogitsFor(key));
}

std::vector<double> ToyModel::EvaluateHidden(const AugmentedInput& input,
                                             std::span<const TokenId> prefix,
                                             int layer) const {
  CheckPrefix(prefix);
  CheckLayer(layer);
  const std::uint64_t key = ToyContextKey(input, prefix);
  volatile double sink = SimulateLayers(key, 0, layer);
  (void)sink;

  const std::vector<double> logits = LogitsFor(key);
  std::vector<double> source = logits;
  if (layer == spec_.num_layers) source = Softmax(logits).vector();

  std::vector<double> hidden(static_cast<size_t>(hidden_dim_));
  SeededRng noise(MixSeed(key, static_cast<std::uint64_t>(layer)));
  for (double& h : hidden) h = noise.Uniform(-1.0, 1.0);
  const LayerMap& map = layers_[static_cast<size_t>(layer - 1)];
  for (size_t v = 0; v < source.size(); ++v) {
    hidden[static_cast<size_t>(map.position[v])] =
        std::ldexp(source[v] * map.sign[v], map.exponent);
  }
  return hidden;
}

TokenDistribution ToyModel::Step(const AugmentedInput& input,
                                 std::span<const TokenId> prefix) {
  return Evaluate(input, prefix);
}

std::vector<TokenDistribution> ToyModel::StepBatch(
    std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
    ExecutionMode mode) {
  if (mode == ExecutionMode::kSequential || inputs.size() <= 1) {
    return Generator::StepBatch(inputs, prefix, mode);
  }
  std::vector<std::future<TokenDistribution>> pending;
  pending.reserve(inputs.size());
  for (const AugmentedInput& input : inputs) {
    pending.push_back(std::async(std::launch::async, [this, &input, prefix] {
      return Evaluate(input, prefix);
    }));
  }
  std::vector<TokenDistribution> out;
  out.reserve(inputs.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

std::vector<double> ToyModel::StepHidden(const AugmentedInput& input,
                                         std::span<const TokenId> prefix,
                                         int layer) {
  return EvaluateHidden(input, prefix, layer);
}

std::vector<std::vector<double>> ToyModel::StepHiddenBatch(
    std::span<const AugmentedInput> inputs, std::span<const TokenId> prefix,
    int layer, ExecutionMode mode) {
  if (mode == ExecutionMode::kSequential || inputs.size() <= 1) {
    return Generator::StepHiddenBatch(inputs, prefix, layer, mode);
  }
  std::vector<std::future<std::vector<double>>> pending;
  pending.reserve(inputs.size());
  for (const AugmentedInput& input : inputs) {
    pending.push_back(
        std::async(std::launch::async, [this, &input, prefix, layer] {
          return EvaluateHidden(input, prefix, layer);
        }));
  }
  std::vector<std::vector<double>> out;
  out.reserve(inputs.size());
  for (auto& f : pending) out.push_back(f.get());
  return out;
}

TokenDistribution ToyModel::ResumeFromHidden(std::span<const double> hidden,
                                             int layer) {
  CheckLayer(layer);
  if (static_cast<int>(hidden.size()) != hidden_dim_) {
    throw Error(ErrorCode::kDimensionMismatch,
                "hidden vector has " + std::to_string(hidden.size()) +
                    " entries, expected " + std::to_string(hidden_dim_));
  }
  const LayerMap& map = layers_[static_cast<size_t>(layer - 1)];
  std::vector<double> source(static_cast<size_t>(vocab_.size()));
  for (size_t v = 0; v < source.size(); ++v) {
    source[v] = std::ldexp(hidden[static_cast<size_t>(map.position[v])],
                           -map.exponent) *
                map.sign[v];
  }
  volatile double sink =
      SimulateLayers(static_cast<std::uint64_t>(layer), layer, spec_.num_layers);
  (void)sink;
  if (layer == spec_.num_layers) {
    return TokenDistribution::Validate(std::move(source));
  }
  return Softmax(source);
}

WeightSnapshot ToyModel::CloneWeights() {
  RequireTrainable();
  return WeightSnapshot(std::make_shared<const Params>(params_), id_);
}

void ToyModel::RestoreWeights(const WeightSnapshot& snapshot) {
  RequireTrainable();
  if (snapshot.empty()) {
    throw Error(ErrorCode::kNoSnapshot, "no snapshot to restore");
  }
  if (snapshot.owner() != id_) {
    throw Error(ErrorCode::kInvalidArgument,
                "snapshot belongs to a different generator");
  }
  params_ = snapshot.as<Params>();
  grads_.clear();
}

void ToyModel::ZeroGrad() {
  RequireTrainable();
  grads_.clear();
}

double ToyModel::AccumulateGradient(const AugmentedInput& input,
                                    std::span<const TokenId> target,
                                    double scale) {
  RequireTrainable();
  double nll = 0.0;
  const size_t v = static_cast<size_t>(vocab_.size());
  for (size_t j = 0; j < target.size(); ++j) {
    const TokenId y = target[j];
    if (y < 0 || static_cast<size_t>(y) >= v) {
      throw Error(ErrorCode::kInvalidArgument, "target token out of range");
    }
    const auto prefix = target.first(j);
    CheckPrefix(prefix);
    const std::uint64_t key = ToyContextKey(input, prefix);
    const TokenDistribution p = Softmax(LogitsFor(key));
    nll -= std::log(p[y]);
    std::vector<double>& g = grads_[key];
    if (g.empty()) g.assign(v, 0.0);
    for (size_t k = 0; k < v; ++k) {
      g[k] += scale * (p[static_cast<int>(k)] - (static_cast<TokenId>(k) == y ? 1.0 : 0.0));
    }
  }
  return nll;
}

void ToyModel::ApplyAdamW(const AdamWStep& step) {
  RequireTrainable();
  ++params_.step;
  const size_t v = static_cast<size_t>(vocab_.size());
  for (const auto& [key, g] : grads_) {
    std::vector<double>& row = params_.logits[key];
    if (row.empty()) row.assign(v, 0.0);
    AdamWUpdate(row, g, params_.moments[key], params_.step, step);
  }
}

}  // namespace ttscale
