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

#include "ttscale/run.h"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <thread>

#include "ttscale/adapt.h"
#include "ttscale/baselines.h"
#include "ttscale/decoder.h"
#include "ttscale/evalkit.h"
#include "ttscale/image.h"
#include "ttscale/imageaug.h"
#include "ttscale/random.h"
#include "ttscale/serialization.h"
#include "ttscale/textaug.h"

namespace ttscale {
namespace {

constexpr std::uint64_t kTextSalt = 1;
constexpr std::uint64_t kImageSalt = 2;
constexpr std::uint64_t kSampleSalt = 0x5a;

bool AugmentsText(Modality m) { return m == Modality::kText || m == Modality::kBoth; }
bool AugmentsImage(Modality m) { return m == Modality::kImage || m == Modality::kBoth; }

std::string Answer(const Generator& g, const GenerationTrace& trace) {
  return Strip(g.vocabulary().Decode(trace.tokens));
}

// N complete answers for the answer-level methods.
std::vector<RankedCandidate> Candidates(Generator& g, const RunConfig& cfg,
                                        const GenerationConfig& gen,
                                        const AugmentedInput& original,
                                        std::uint64_t seed_q) {
  std::vector<RankedCandidate> out;
  if (cfg.candidates == CandidateSource::kTemperature) {
    for (int i = 0; i < cfg.generation.n_aug; ++i) {
      const GenerationTrace t = TemperatureSample(
          g, original, cfg.temperature, gen,
          MixSeed(seed_q, kSampleSalt + static_cast<std::uint64_t>(i)));
      out.push_back({Answer(g, t), t.token_logprobs});
    }
    return out;
  }
  for (const AugmentedInput& in : BuildAugmentedInputs(original, cfg.generation, seed_q, &g)) {
    const GenerationTrace t = GreedyDecode(g, in, gen);
    out.push_back({Answer(g, t), t.token_logprobs});
  }
  return out;
}

std::string EscapeNewlines(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\r') {
      out += "\\r";
    } else {
      out += c;
    }
  }
  return out;
}

}  // namespace

std::uint64_t DeriveQuestionSeed(std::uint64_t seed, std::string_view id) {
  return StableHasher().UpdateU64(seed).Update(id).digest();
}

AugmentedInput OriginalInput(const QuestionRecord& rec,
                             const std::filesystem::path& base_dir) {
  AugmentedInput in;
  in.prompt = rec.prompt;
  in.origin_id = rec.id;
  if (rec.image_path) {
    std::filesystem::path p(*rec.image_path);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    in.image = LoadImage(p);
  }
  return in;
}

std::vector<AugmentedInput> BuildAugmentedInputs(const AugmentedInput& original,
                                                 const GenerationConfig& cfg,
                                                 std::uint64_t seed_q,
                                                 Generator* paraphraser) {
  cfg.Validate();
  if (cfg.n_aug == 1 || cfg.modality == Modality::kNone) return {original};

  const int n = cfg.n_aug;
  std::vector<std::string> prompts(static_cast<size_t>(n), original.prompt);
  if (AugmentsText(cfg.modality)) {
    if (cfg.text_strategy == TextStrategy::kSelfParaphrase) {
      if (paraphraser == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "self-paraphrase needs a generator");
      }
      prompts = SelfParaphrase(*paraphraser, original.prompt, n, seed_q);
    } else {
      for (int i = 0; i < n; ++i) {
        const std::uint64_t v = MixSeed(seed_q, static_cast<std::uint64_t>(i));
        prompts[static_cast<size_t>(i)] =
            ClassicalTextPipeline(original.prompt, MixSeed(v, kTextSalt));
      }
    }
    if (cfg.consistency_enforcement) {
      for (std::string& p : prompts) p = EnforceConsistency(p, original.prompt);
    }
  }

  std::vector<AugmentedInput> out;
  out.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    AugmentedInput in = original;
    in.prompt = prompts[static_cast<size_t>(i)];
    in.variant_index = i;
    if (in.image && AugmentsImage(cfg.modality)) {
      const std::uint64_t v = MixSeed(seed_q, static_cast<std::uint64_t>(i));
      in.image = ApplyImageAug(*in.image, cfg.image_strength, MixSeed(v, kImageSalt));
    }
    out.push_back(std::move(in));
  }
  return out;
}

std::string AnswerQuestion(Generator& g, const RunConfig& cfg,
                           const AugmentedInput& original, std::uint64_t seed_q) {
  GenerationConfig gen = cfg.generation;
  gen.eos_token = g.vocabulary().eos();
  gen.seed = seed_q;

  switch (cfg.method) {
    case Method::kBaseline:
      return Answer(g, GreedyDecode(g, original, gen));
    case Method::kTtaug:
    case Method::kTtadaptWeights:
    case Method::kTtadaptParams: {
      const std::vector<AugmentedInput> inputs =
          BuildAugmentedInputs(original, cfg.generation, seed_q, &g);
      gen.n_aug = static_cast<int>(inputs.size());
      if (cfg.method == Method::kTtaug) return Answer(g, TtaugGenerate(g, inputs, gen));
      if (cfg.method == Method::kTtadaptWeights) {
        return Answer(g, TtadaptWeightsGenerate(g, inputs, gen, *cfg.weight_opt));
      }
      return Answer(g, TtadaptParamsGenerate(g, inputs, gen, *cfg.adapt));
    }
    case Method::kSelfConsistency:
    case Method::kSelfSelector:
    case Method::kSampleAndRank:
    case Method::kSelfSynthesizer:
      break;
  }

  const std::vector<RankedCandidate> ranked = Candidates(g, cfg, gen, original, seed_q);
  std::vector<std::string> texts;
  for (const RankedCandidate& c : ranked) texts.push_back(c.text);
  switch (cfg.method) {
    case Method::kSelfConsistency:
      return SelfConsistency(texts);
    case Method::kSampleAndRank:
      return SampleAndRank(ranked);
    case Method::kSelfSelector:
      return texts[static_cast<size_t>(SelfSelect(g, original, texts, seed_q))];
    case Method::kSelfSynthesizer:
      return SelfSynthesize(g, original, texts, gen);
    default:
      break;
  }
  throw Error(ErrorCode::kInvalidConfig, "unhandled method");
}

RunReport EvaluateRecords(const RunConfig& cfg,
                          const std::vector<QuestionRecord>& records,
                          const std::filesystem::path& base_dir,
                          const GeneratorFactory& factory) {
  cfg.Validate();
  RunReport report;
  report.method = cfg.method;
  report.benchmark = cfg.dataset_path.stem().string();
  report.records.resize(records.size());

  const int workers =
      std::max(1, std::min<int>(cfg.workers, static_cast<int>(records.size())));
  std::vector<std::unique_ptr<Generator>> handles;
  for (int w = 0; w < workers; ++w) handles.push_back(factory());

  std::atomic<size_t> next{0};
  const auto work = [&](Generator& g) {
    for (size_t i = next++; i < records.size(); i = next++) {
      const QuestionRecord& rec = records[i];
      MetricResult& out = report.records[i];
      try {
        const std::uint64_t seed_q = DeriveQuestionSeed(cfg.generation.seed, rec.id);
        const std::string pred = AnswerQuestion(g, cfg, OriginalInput(rec, base_dir), seed_q);
        out = ScoreRecord(rec, pred);
      } catch (const std::exception& e) {
        out.id = rec.id;
        out.score = 0.0;
        out.metric_name = std::string(MetricName(rec.task));
        out.prediction.clear();
        const auto* err = dynamic_cast<const Error*>(&e);
        out.error = (err ? std::string(ErrorCodeName(err->code())) + ": " : std::string()) +
                    e.what();
      }
    }
  };
  if (workers == 1) {
    work(*handles.front());
  } else {
    std::vector<std::thread> threads;
    for (auto& h : handles) threads.emplace_back(work, std::ref(*h));
    for (auto& t : threads) t.join();
  }

  double total = 0.0;
  for (const MetricResult& r : report.records) {
    if (r.error) {
      ++report.failed;
    } else {
      total += r.score;
    }
  }
  const size_t scored = report.records.size() - report.failed;
  report.mean_score = scored > 0 ? total / static_cast<double>(scored) : 0.0;
  return report;
}

RunReport RunEval(const RunConfig& cfg, const GeneratorFactory& factory) {
  cfg.Validate();
  const std::vector<QuestionRecord> all = ReadQuestionRecords(cfg.dataset_path);
  std::vector<QuestionRecord> sample;
  if (!all.empty()) {
    for (size_t i : UniformIntervalSample(all.size(), std::min(cfg.sample_k, all.size()))) {
      sample.push_back(all[i]);
    }
  }
  RunReport report =
      EvaluateRecords(cfg, sample, cfg.dataset_path.parent_path(), factory);

  std::filesystem::create_directories(cfg.output_dir);
  std::ofstream records(cfg.output_dir / "records.jsonl");
  std::ofstream aggregate(cfg.output_dir / "aggregate.csv");
  if (!records || !aggregate) {
    throw Error(ErrorCode::kIo, "cannot write into " + cfg.output_dir.string());
  }
  WriteJsonLines(records, report.records);
  WriteAggregateCsv(aggregate, report);
  return report;
}

RunReport RunEval(const RunConfig& cfg) {
  // Open one handle up front so an unreachable model fails the whole run.
  std::unique_ptr<Generator> first = OpenModel(cfg.model);
  std::mutex mu;
  return RunEval(cfg, [&]() -> std::unique_ptr<Generator> {
    std::lock_guard lock(mu);
    if (first) return std::move(first);
    return OpenModel(cfg.model);
  });
}

void WriteAggregateCsv(std::ostream& out, const RunReport& report) {
  out << "benchmark,method,records,failed,mean_score\n"
      << report.benchmark << ',' << ToString(report.method) << ','
      << report.records.size() << ',' << report.failed << ','
      << std::setprecision(10) << report.mean_score << '\n';
}

void AugmentDump(const AugmentedInput& original, const GenerationConfig& cfg,
                 std::uint64_t seed, const std::filesystem::path& out_dir,
                 Generator* paraphraser) {
  const std::vector<AugmentedInput> inputs =
      BuildAugmentedInputs(original, cfg, seed, paraphraser);
  std::filesystem::create_directories(out_dir);
  std::ofstream prompts(out_dir / "prompts.txt");
  if (!prompts) throw Error(ErrorCode::kIo, "cannot write into " + out_dir.string());
  for (const AugmentedInput& in : inputs) {
    prompts << EscapeNewlines(in.prompt) << '\n';
    if (in.image) {
      SavePng(*in.image, out_dir / ("variant_" + std::to_string(in.variant_index) + ".png"));
    }
  }
}

}  // namespace ttscale
